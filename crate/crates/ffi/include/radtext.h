#ifndef RADTEXT_H
#define RADTEXT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  RT_STATUS_OK = 0,
  RT_STATUS_NULL_ARGUMENT = 1,
  RT_STATUS_INVALID_UTF8 = 2,
  RT_STATUS_XML = 3,
  RT_STATUS_SCHEMA = 4,
  RT_STATUS_VALIDATION = 5,
  RT_STATUS_CONVERSION = 6,
  RT_STATUS_CONFIG = 7,
  RT_STATUS_CSV = 8,
  RT_STATUS_RESOURCE = 9,
  RT_STATUS_PATTERN = 10,
  RT_STATUS_PARSE = 11,
  RT_STATUS_PIPELINE_ORDER = 12,
  RT_STATUS_STAGE = 13,
  RT_STATUS_IO = 14,
  RT_STATUS_PANIC = 15,
} RtStatus;

// An annotated document collection.
typedef struct RtCollection RtCollection;

// A checked annotator sequence with its resources loaded.
typedef struct RtPipeline RtPipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next radtext call on the same thread.
const char *rt_last_error_message(void);

// Library version as a static string.
const char *rt_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void rt_string_free(char *s);

// Parse BioC XML.
//
// # Safety
// `xml` must be a NUL-terminated string; `out` must be writable.
RtStatus rt_collection_parse_xml(const char *xml, RtCollection **out);

// Build a collection from a CSV of notes. `date` may be null for today.
//
// # Safety
// String arguments must be NUL-terminated or, where allowed, null; `out`
// must be writable.
RtStatus rt_collection_from_csv(const char *csv,
                                const char *id_column,
                                const char *text_column,
                                const char *date,
                                RtCollection **out);

// Rebuild a collection from NOTE_NLP CSV. `notes_csv` (columns
// note_id,note_text) may be null.
//
// # Safety
// String arguments must be NUL-terminated or null where allowed; `out`
// must be writable.
RtStatus rt_collection_from_note_nlp_csv(const char *rows_csv,
                                         const char *notes_csv,
                                         RtCollection **out);

// Serialize to BioC XML.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
RtStatus rt_collection_to_xml(const RtCollection *c, char **out);

// Export annotations as NOTE_NLP CSV.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
RtStatus rt_collection_to_note_nlp_csv(const RtCollection *c, char **out);

// Number of documents; 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
uintptr_t rt_collection_document_count(const RtCollection *c);

// # Safety
// `c` must be null or a handle not yet freed.
void rt_collection_free(RtCollection *c);

// Check an annotator list such as "deid,secsplit,ssplit,ner,parse,tree2dep,neg"
// and load its resources. Files present in `resource_dir` (may be null)
// replace the built-in ones.
//
// # Safety
// `annotators` must be NUL-terminated; `resource_dir` NUL-terminated or
// null; `out` writable.
RtStatus rt_pipeline_new(const char *annotators, const char *resource_dir, RtPipeline **out);

// Apply the pipeline's document stages to a copy of `input`.
//
// # Safety
// `p` and `input` must be live handles; `out` writable.
RtStatus rt_pipeline_run(const RtPipeline *p, const RtCollection *input, RtCollection **out);

// Document-by-finding labels of an annotated collection, as CSV.
//
// # Safety
// `p` and `c` must be live handles; `out` writable.
RtStatus rt_pipeline_collect_labels_csv(const RtPipeline *p, const RtCollection *c, char **out);

// # Safety
// `p` must be null or a handle not yet freed.
void rt_pipeline_free(RtPipeline *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADTEXT_H */
