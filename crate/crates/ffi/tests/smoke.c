#include <stdio.h>
#include <string.h>
#include "constellation_lab.h"

static const char *FREE_ORBIT =
    "[group]\nkind = finite_abelian\norders = 3\n"
    "[action]\nx = 2\ny = 1\n"
    "[theta]\n0 = -2\n1 = 1\n2 = 1\n"
    "[module]\ndim 0 = 1\ndim 1 = 1\ndim 2 = 1\n"
    "arrow x 0 = [[1]]\narrow x 1 = [[1]]\narrow x 2 = [[1]]\n"
    "arrow y 0 = [[1]]\narrow y 1 = [[1]]\narrow y 2 = [[1]]\n";

int main(void) {
    ClProblem *p = NULL;
    if (cl_problem_parse(FREE_ORBIT, &p) != CL_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", cl_last_error_message());
        return 1;
    }
    ClRunFlags flags = cl_run_flags_default();
    flags.seed = 3;
    char *json = NULL;
    if (cl_run(CL_COMMAND_GIT_CHECK, p, &flags, &json) != CL_STATUS_OK) {
        fprintf(stderr, "run: %s\n", cl_last_error_message());
        return 1;
    }
    int ok = strstr(json, "\"STABLE\"") != NULL;
    cl_string_free(json);
    cl_problem_free(p);

    ClProblem *bad = NULL;
    if (cl_problem_parse("[group]\nkind = nope\n", &bad) != CL_STATUS_INPUT_ERROR || bad != NULL) {
        return 1;
    }
    printf("%s %s\n", cl_version(), ok ? "ok" : "missing verdict");
    return ok ? 0 : 1;
}
