#include <stdio.h>
#include <string.h>

#include "hammer.h"

static const char *BAD_SRC = "(typing A (sort prop))\n(typing B";

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    hammer_last_error());                                  \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(int argc, char **argv) {
    if (argc != 2) {
        return 2;
    }
    FILE *f = fopen(argv[1], "rb");
    CHECK(f != NULL);
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[n] = 0;

    HammerEnv *env = NULL;
    CHECK(hammer_env_parse(BAD_SRC, &env) == HAMMER_STATUS_PARSE);
    CHECK(env == NULL);
    CHECK(strlen(hammer_last_error()) > 0);

    CHECK(hammer_env_parse(buf, &env) == HAMMER_STATUS_OK);
    CHECK(hammer_env_len(env) > 0);

    HammerProblem *p = NULL;
    CHECK(hammer_translate(env, "missing", NULL, 2, &p) == HAMMER_STATUS_UNKNOWN_NAME);
    CHECK(hammer_translate(env, "plus_S_comm", NULL, 2, &p) == HAMMER_STATUS_OK);
    CHECK(hammer_problem_axiom_count(p) > 0);

    char *tptp = NULL;
    CHECK(hammer_problem_tptp(p, &tptp) == HAMMER_STATUS_OK);
    CHECK(strstr(tptp, "conjecture") != NULL);
    hammer_string_free(tptp);

    HammerAtpStatus status;
    char *report = NULL;
    CHECK(hammer_prove(p, NULL, 30.0, &status, &report) == HAMMER_STATUS_OK);
    CHECK(status == HAMMER_ATP_STATUS_THEOREM);

    char *trace = NULL;
    CHECK(hammer_reconstruct(env, "plus_S_comm", report, 8, 10.0, &trace) == HAMMER_STATUS_OK);
    CHECK(trace[0] == '{');
    hammer_string_free(trace);
    hammer_string_free(report);

    CHECK(hammer_reconstruct(env, "plus_S_comm", NULL, 8, 10.0, &trace) == HAMMER_STATUS_RECONSTRUCT_FAILED);

    hammer_problem_free(p);
    hammer_env_free(env);
    printf("ok %s\n", hammer_version());
    return 0;
}
