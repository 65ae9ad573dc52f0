//! Light-Edge device registration, fuzzy trust computation and a
//! deterministic protocol harness.
//!
//! * [`primitives`]: adjoint operator, SHA-256, digest XOR.
//! * [`registration`]: credential derivation on the device and trust center.
//! * [`fuzzy`]: Mamdani inference with the Light-Edge rule base.
//! * [`trust`]: activity logs, time windows and trust reports.
//! * [`sim`]: message bus, adversary and scenario runner.
//! * [`store`]: text-file persistence for credentials and activity.

pub mod fuzzy;
pub mod primitives;
pub mod registration;
pub mod sim;
pub mod store;
pub mod trust;

pub use fuzzy::{FuzzyConfig, FuzzyError};
pub use primitives::{adjoin, hash, xor, HashDigest, PrimitiveError};
pub use registration::{
    device_enroll, device_store, tc_register, verify_credentials, DeviceRecord, DeviceStore,
    RegistrationError, RegistrationMessage, TrustCenterRecord, TrustCenterSecret, TrustCenterStore,
};
pub use sim::{
    check_secrecy, run_registration_scenario, AdversaryKind, AdversaryMode, ScenarioResult,
    SimError, Transcript,
};
pub use store::StoreError;
pub use trust::{
    assess_trust, ActionKind, ActivityLog, ActivityRecord, TrustError, TrustReport, WindowConfig,
};
