#include <stdio.h>
#include <string.h>

#include "blindcounter.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    BcaAutomaton *a = NULL, *e = NULL;
    BcaVerdict *v = NULL;
    char *text = NULL;
    size_t violations = 1;

    CHECK(bca_automaton_liminf(&a) == BCA_STATUS_OK);
    CHECK(bca_automaton_violation_count(a, &violations) == BCA_STATUS_OK);
    CHECK(violations == 0);
    CHECK(bca_automaton_eliminate_epsilon(a, &e) == BCA_STATUS_OK);

    CHECK(bca_decide(e, "|aabb", 0, &v) == BCA_STATUS_OK);
    CHECK(bca_verdict_accepted(v));
    CHECK(bca_verdict_to_text(v, &text) == BCA_STATUS_OK);
    CHECK(strstr(text, "accepted=true") != NULL);
    bca_string_free(text);
    bca_verdict_free(v);

    CHECK(bca_decide(e, "|aaab", 0, &v) == BCA_STATUS_OK);
    CHECK(!bca_verdict_accepted(v));
    bca_verdict_free(v);

    CHECK(bca_decide(e, "no bar", 0, &v) == BCA_STATUS_WORD_ERROR);
    CHECK(bca_last_error() != NULL);

    bca_automaton_free(e);
    bca_automaton_free(a);
    printf("ok %s\n", bca_version());
    return 0;
}
