//! Direct-detection receiver and metrology.

mod detect;
mod ffe;
mod metrics;
mod sync;

pub use detect::{digitize, photodetect, DigitizerModel, PhotodiodeModel};
pub use ffe::{ffe_train_apply, EqualizerState, FfeConfig};
pub use metrics::{
    decide_and_ber, decide_map, estimate_noise_variance, evaluate_metrics, gmi_ngmi, llr_compute,
    net_bitrate_ps, net_bitrate_uniform, required_code_rate, shaped_bitrate_gbps,
    uniform_bitrate_gbps, BerResult, BitrateFormula, GmiEstimate, MetricsOptions, MetricsReport,
    RateTable, LLR_CAP, OUTER_FEC_OVERHEAD,
};
pub use sync::{synchronize, SyncResult, SYNC_THRESHOLD};
