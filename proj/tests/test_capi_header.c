/* The public header must compile as plain C and the library must be
 * callable from it. */
#include <stdio.h>
#include <string.h>

#include "capg/capg.h"

int main(void) {
    if (capg_version() == NULL) {
        fprintf(stderr, "no version\n");
        return 1;
    }
    if (strcmp(capg_status_name(CAPG_OK), "ok") != 0) {
        fprintf(stderr, "bad status name\n");
        return 1;
    }

    const char* doc =
        "[{\"CVE\": \"2021-44228\","
        " \"exploit\": \"https://github.com/kozmer/log4j-shell-poc\","
        " \"vuln_class\": \"application\","
        " \"machines_constraints\": [\"unconstrained\"],"
        " \"users_constraints\": [],"
        " \"user_source\": \"any-user\","
        " \"user_destination\": \"machine-local\"}]";

    capg_records* records = NULL;
    char* report = NULL;
    capg_status status = capg_records_parse(doc, 0, &records, &report);
    if (status != CAPG_OK || capg_records_count(records) != 1) {
        fprintf(stderr, "parse failed: %s\n", capg_status_name(status));
        return 1;
    }
    capg_string_free(report);

    char* text = NULL;
    status = capg_records_serialize(records, &text);
    if (status != CAPG_OK || text == NULL || strstr(text, "2021-44228") == NULL) {
        fprintf(stderr, "serialize failed\n");
        return 1;
    }
    capg_string_free(text);
    capg_records_free(records);

    printf("ok\n");
    return 0;
}
