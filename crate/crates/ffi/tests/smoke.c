#include <stdio.h>
#include <string.h>
#include "unigui.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, ug_last_error() ? ug_last_error() : ""); return 1; } } while (0)

int main(void) {
    UgRegistry *reg = NULL;
    UgAction *act = NULL;
    char *text = NULL;
    uint64_t tokens = 0;

    CHECK(ug_registry_preset("mobile", &reg) == UG_STATUS_OK);
    CHECK(ug_action_parse("mobile.long_press(x=0.5, y=0.25)", reg, &act) == UG_STATUS_OK);
    CHECK(ug_action_serialize(act, &text) == UG_STATUS_OK);
    CHECK(strcmp(text, "mobile.long_press(x=0.5, y=0.25)") == 0);
    ug_string_free(text);
    ug_action_free(act);

    CHECK(ug_action_parse("pyautogui.click(x=0.5", reg, &act) == UG_STATUS_PARSE_ERROR);
    CHECK(ug_last_error() != NULL);
    CHECK(ug_image_tokens(1280, 720, &tokens) == UG_STATUS_OK && tokens == 1196);

    const char *prev[] = {"Open the menu."};
    CHECK(ug_build_inference_prompt(UG_PROMPT_MODE_ENFORCED_PLAN, "open settings", prev, 1, &text) == UG_STATUS_OK);
    CHECK(strstr(text, "Step 1: Open the menu.") != NULL);
    ug_string_free(text);
    ug_registry_free(reg);
    puts("ok");
    return 0;
}
