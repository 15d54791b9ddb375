#ifndef INFLUENCERRANK_H
#define INFLUENCERRANK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define IR_API __declspec(dllexport)
#else
#define IR_API __attribute__((visibility("default")))
#endif

/* Stable status codes; also the CLI exit codes. */
typedef enum ir_status {
  IR_OK = 0,
  IR_USAGE = 1,     /* bad argument, config or shape */
  IR_DATA = 2,      /* missing or malformed files */
  IR_NUMERICAL = 3, /* non-finite loss, failed gradient check */
  IR_INTERNAL = 4
} ir_status;

typedef struct ir_config ir_config;
typedef struct ir_world ir_world;
typedef struct ir_model ir_model;

/* Message of the last failure on this thread; "" after success. */
IR_API const char* ir_last_error(void);
/* Frees strings returned through char** out parameters. */
IR_API void ir_string_free(char* s);
IR_API const char* ir_version(void);

/* Run configuration: defaults, then JSON merge patches in call order. */
IR_API ir_status ir_config_create(ir_config** out);
IR_API ir_status ir_config_merge_json(ir_config* cfg, const char* json);
IR_API ir_status ir_config_merge_file(ir_config* cfg, const char* path);
/* Resolved config as JSON. */
IR_API ir_status ir_config_to_json(const ir_config* cfg, char** out);
IR_API void ir_config_destroy(ir_config* cfg);

/* Batch commands. */
IR_API ir_status ir_cmd_generate(const ir_config* cfg);
IR_API ir_status ir_cmd_train(const ir_config* cfg);
/* score_source: "model", "oracle", "random" or "followers". */
IR_API ir_status ir_cmd_eval(const ir_config* cfg, const char* score_source);
IR_API ir_status ir_cmd_ablate(const ir_config* cfg, const char* variant);
/* axis: "window-length" or "history-length". */
IR_API ir_status ir_cmd_sweep(const ir_config* cfg, const char* axis);
/* corrupt != 0 perturbs one gradient entry before comparing. The worst
   relative error is stored in *max_rel_error when non-null. */
IR_API ir_status ir_cmd_gradcheck(const ir_config* cfg, int corrupt, double* max_rel_error);

/* Synthetic worlds. */
IR_API ir_status ir_world_generate(const ir_config* cfg, ir_world** out);
IR_API ir_status ir_world_load(const char* dir, ir_world** out);
IR_API ir_status ir_world_save(const ir_world* world, const char* dir);
IR_API size_t ir_world_influencer_count(const ir_world* world);
IR_API size_t ir_world_post_count(const ir_world* world);
IR_API size_t ir_world_window_count(const ir_world* world);
IR_API void ir_world_destroy(ir_world* world);

/* Trained models. */
IR_API ir_status ir_model_load(const char* checkpoint, ir_model** out);
IR_API size_t ir_model_parameter_count(const ir_model* model);
/* Scores influencers of the world's final input window, in ascending id
   order. `scores` must hold ir_world_influencer_count() values. */
IR_API ir_status ir_model_predict(const ir_model* model, const ir_world* world, const ir_config* cfg,
                                  double* scores, size_t n);
IR_API void ir_model_destroy(ir_model* model);

/* Metrics. */
IR_API ir_status ir_engagement_rate(const int64_t* likes, size_t n, double followers, double* out);
IR_API int ir_relevance_level(double engagement);
IR_API ir_status ir_ndcg_at_k(const int* ranking, const int* ideal, size_t n, size_t k, double* out);
IR_API ir_status ir_rbp(const double* gains, size_t n, double p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* INFLUENCERRANK_H */
