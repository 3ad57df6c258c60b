#ifndef UNIGUI_H
#define UNIGUI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  UG_PROMPT_MODE_SELF_PLAN = 0,
  UG_PROMPT_MODE_ENFORCED_PLAN = 1,
} UgPromptMode;

typedef enum {
  UG_STATUS_OK = 0,
  UG_STATUS_NULL_ARGUMENT = 1,
  UG_STATUS_INVALID_UTF8 = 2,
  UG_STATUS_PARSE_ERROR = 3,
  UG_STATUS_INVALID_ACTION = 4,
  UG_STATUS_PROTOCOL_ERROR = 5,
  UG_STATUS_REGISTRY_ERROR = 6,
  UG_STATUS_COST_ERROR = 7,
  UG_STATUS_PANIC = 99,
} UgStatus;

/**
 * Opaque parsed command.
 */
typedef struct UgAction UgAction;

/**
 * Opaque function registry.
 */
typedef struct UgRegistry UgRegistry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next `ug_*` call on the same thread.
 */
const char *ug_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void ug_string_free(char *s);

/**
 * Looks up a bundled registry: "web", "mobile" or "desktop".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
UgStatus ug_registry_preset(const char *name, UgRegistry **out);

/**
 * Builds a registry from its JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
UgStatus ug_registry_from_json(const char *json, UgRegistry **out);

/**
 * # Safety
 * `reg` must come from this library or be NULL.
 */
void ug_registry_free(UgRegistry *reg);

/**
 * Function documentation block for the system prompt.
 *
 * # Safety
 * `reg` must be a live registry; `out` must be writable.
 */
UgStatus ug_registry_render_docs(const UgRegistry *reg, char **out);

/**
 * Parses one command. With a registry, declared plugin functions resolve
 * and the command is validated against it.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `reg` may be NULL; `out` must be
 * writable.
 */
UgStatus ug_action_parse(const char *text, const UgRegistry *reg, UgAction **out);

/**
 * # Safety
 * `action` must come from this library or be NULL.
 */
void ug_action_free(UgAction *action);

/**
 * Canonical text of a command.
 *
 * # Safety
 * `action` must be live; `out` must be writable.
 */
UgStatus ug_action_serialize(const UgAction *action, char **out);

/**
 * Syntax tree of a command as JSON.
 *
 * # Safety
 * `action` must be live; `out` must be writable.
 */
UgStatus ug_action_to_json(const UgAction *action, char **out);

/**
 * Violations of `action` under `reg` as a JSON array; `[]` means valid.
 *
 * # Safety
 * `action` and `reg` must be live; `out` must be writable.
 */
UgStatus ug_action_validate(const UgAction *action, const UgRegistry *reg, char **out);

/**
 * Visual tokens of one screenshot.
 *
 * # Safety
 * `out` must be writable.
 */
UgStatus ug_image_tokens(uint32_t width, uint32_t height, uint64_t *out);

/**
 * Token-multiset F1 between two operation texts.
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must be writable.
 */
UgStatus ug_operation_f1(const char *pred, const char *gold, double *out);

/**
 * Inference prompt for the next step. `previous` holds `n_previous`
 * low-level instructions in order and may be NULL when `n_previous` is 0.
 *
 * # Safety
 * `goal` and every entry of `previous` must be NUL-terminated strings.
 */
UgStatus ug_build_inference_prompt(UgPromptMode mode,
                                   const char *goal,
                                   const char *const *previous,
                                   size_t n_previous,
                                   char **out);

/**
 * Parses generated assistant text into a turn, returned as JSON.
 *
 * # Safety
 * `text` must be NUL-terminated; `reg` may be NULL; `out` must be writable.
 */
UgStatus ug_parse_model_response(const char *text, const UgRegistry *reg, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIGUI_H */
