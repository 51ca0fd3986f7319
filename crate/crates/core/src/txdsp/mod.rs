//! Transmitter DSP: Volterra pre-distortion, RRC pulse shaping, linear
//! pre-emphasis and the digital band split feeding the two-branch
//! transmitter.

mod bandsplit;
mod pulse;
mod volterra;

pub use bandsplit::{band_split, BandPlan};
pub use pulse::{decimate, linear_preemphasis, rrc_matched_filter, rrc_upsample};
pub use volterra::{
    apply_volterra, fit_volterra, held_out_nmse_db, FitReport, Pruning, VolterraKernel,
    VolterraStructure, MAX_CONDITION_NUMBER,
};
