use crate::folir::FolTerm;

/// Ground equational consequence by saturation: the relation over all
/// subterms of the equations and the query is closed under reflexivity,
/// symmetry, transitivity and congruence until nothing changes.
pub fn ground_completion(equations: &[(FolTerm, FolTerm)], s: &FolTerm, t: &FolTerm) -> bool {
    let mut terms: Vec<FolTerm> = Vec::new();
    let mut add = |t: &FolTerm| {
        let mut subs = Vec::new();
        t.subterms(&mut subs);
        for u in subs {
            if !terms.contains(u) {
                terms.push(u.clone());
            }
        }
    };
    for (l, r) in equations {
        add(l);
        add(r);
    }
    add(s);
    add(t);
    let n = terms.len();
    let pos = |x: &FolTerm| terms.iter().position(|y| y == x).expect("collected");
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for (l, r) in equations {
        let (i, j) = (pos(l), pos(r));
        rel[i][j] = true;
        rel[j][i] = true;
    }
    let args: Vec<Option<(&str, Vec<usize>)>> = terms
        .iter()
        .map(|t| match t {
            FolTerm::Fun(f, xs) => Some((f.as_str(), xs.iter().map(pos).collect())),
            FolTerm::Var(_) => None,
        })
        .collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    continue;
                }
                let trans = (0..n).any(|k| rel[i][k] && rel[k][j]);
                let cong = match (&args[i], &args[j]) {
                    (Some((f, xs)), Some((g, ys))) => {
                        f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| rel[*a][*b])
                    }
                    _ => false,
                };
                if trans || cong {
                    rel[i][j] = true;
                    rel[j][i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel[pos(s)][pos(t)];
        }
    }
}
