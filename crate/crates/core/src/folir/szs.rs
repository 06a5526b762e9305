use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Outcome of one prover run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtpStatus {
    Theorem,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    Error,
}

impl AtpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AtpStatus::Theorem => "Theorem",
            AtpStatus::CounterSatisfiable => "CounterSatisfiable",
            AtpStatus::Timeout => "Timeout",
            AtpStatus::GaveUp => "GaveUp",
            AtpStatus::Error => "Error",
        }
    }

    fn from_szs(word: &str) -> Option<Self> {
        Some(match word {
            "Theorem" | "Unsatisfiable" | "ContradictoryAxioms" | "Equivalent" | "TautologousConclusion" => {
                AtpStatus::Theorem
            }
            "CounterSatisfiable" | "Satisfiable" | "CounterTheorem" => AtpStatus::CounterSatisfiable,
            "Timeout" | "ResourceOut" | "MemoryOut" => AtpStatus::Timeout,
            "GaveUp" | "GiveUp" | "Unknown" | "Inappropriate" | "Incomplete" | "NotTested" => AtpStatus::GaveUp,
            "Error" | "InputError" | "SyntaxError" | "OSError" => AtpStatus::Error,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtpResult {
    pub status: AtpStatus,
    /// Cited problem labels; non-empty only for `Theorem`.
    pub used_labels: Vec<String>,
    pub wall_time: Duration,
    /// Prover output kept when no status could be recognized.
    pub raw: Option<String>,
}

impl AtpResult {
    pub fn new(status: AtpStatus) -> Self {
        Self {
            status,
            used_labels: Vec::new(),
            wall_time: Duration::ZERO,
            raw: None,
        }
    }
}

/// Extracts the status and the cited axiom labels from prover output.
///
/// The status is the word after the first `SZS status`; output without one is
/// an `Error`. Labels come from `file('...', label)` annotations in a proof
/// object and, failing that, from the names of echoed `fof(label, axiom, ...)`
/// lines inside an `SZS output` block.
pub fn parse_szs(output: &str) -> AtpResult {
    let recognized = output
        .split("SZS status")
        .nth(1)
        .and_then(|rest| rest.split_whitespace().next())
        .and_then(AtpStatus::from_szs);
    let status = recognized.unwrap_or(AtpStatus::Error);
    let mut used = Vec::new();
    if status == AtpStatus::Theorem {
        let mut push = |l: &str| {
            let l = l.trim().to_string();
            if !l.is_empty() && !used.contains(&l) {
                used.push(l);
            }
        };
        let mut rest = output;
        let mut found_file = false;
        while let Some(i) = rest.find("file(") {
            rest = &rest[i + 5..];
            let Some(close) = rest.find(')') else { break };
            let inside = &rest[..close];
            if let Some(comma) = inside.rfind(',') {
                push(&inside[comma + 1..]);
                found_file = true;
            }
        }
        if !found_file {
            let mut in_block = false;
            for line in output.lines() {
                if line.contains("SZS output start") {
                    in_block = true;
                } else if line.contains("SZS output end") {
                    in_block = false;
                } else if in_block {
                    let t = line.trim_start();
                    if let Some(body) = t.strip_prefix("fof(").or_else(|| t.strip_prefix("cnf(")) {
                        let mut parts = body.splitn(3, ',');
                        if let (Some(name), Some(role)) = (parts.next(), parts.next()) {
                            let role = role.trim();
                            if role == "axiom" || role == "conjecture" || role == "hypothesis" {
                                push(name);
                            }
                        }
                    }
                }
            }
        }
    }
    AtpResult {
        status,
        used_labels: used,
        wall_time: Duration::ZERO,
        raw: recognized.is_none().then(|| output.to_string()),
    }
}
