//! The Sasaki chart over a Kähler base, compatible Lorentzian metrics on
//! `S × ℝ`, and their connection in the frame `(p_o, Ê_i, q_o)`.

pub mod frame;
pub mod lorentz;
pub mod sasaki;

pub use frame::{christoffel_frame, frame_crosscheck, frame_params, frame_ricci, FrameParams, FrameTable, Variant};
pub use lorentz::{
    build_lorentz_firm, build_lorentz_general, BundleMetric, FirmMetric, FirmProfile, GeneralMetric, GeneralProfile,
    ScalarField,
};
pub use sasaki::{build_sasaki, verify_sasaki, SasakiChart};
