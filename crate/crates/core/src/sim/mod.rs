//! Deterministic multi-actor harness: devices, a trust center and a service
//! provider exchanging messages over a synchronous, ordered bus, with an
//! optional adversary sitting on the bus.
//!
//! The checks here are transcript-level: secrecy is "no designated secret
//! appears verbatim in any payload", and replay resistance is "a re-delivered
//! registration is refused". There is no symbolic deduction, so an attacker
//! who could combine observed values is not modelled.

mod adversary;
mod wire;

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::registration::{
    center_mask, device_enroll, device_store, pseudonym, tc_register, verify_credentials,
    DeviceRecord, RegistrationError, RegistrationMessage, TrustCenterSecret, TrustCenterStore,
};
use crate::trust::{ActionKind, ActivityLog, ActivityRecord};

pub use adversary::{AdversaryKind, AdversaryMode};
pub use wire::{ActorId, MessageKind, Transcript, WireMessage};

use adversary::{Adversary, Interception};
use wire::{
    decode_ack, decode_activity, encode_ack, encode_activity, parse_registration_response,
    registration_response, STATUS_DUPLICATE, STATUS_MALFORMED, STATUS_OK,
};

/// Simulated clock origin (seconds).
pub const EPOCH: u64 = 1_700_000_000;

pub const TRUST_CENTER: &str = "tc";
pub const SERVICE_PROVIDER: &str = "sp-0";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("a scenario needs at least one device")]
    NoDevices,
    #[error("unknown adversary mode {0:?}")]
    UnknownAdversary(String),
    #[error("unknown message kind {0:?}")]
    UnknownKind(String),
    #[error("no actor {0} on the bus")]
    UnknownActor(String),
    #[error(transparent)]
    Registration(#[from] RegistrationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSecret {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl NamedSecret {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        NamedSecret {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecrecyViolation {
    pub seq: u64,
    pub secret: String,
}

/// Every `(message, secret)` pair where the secret occurs as a contiguous
/// substring of the payload. Empty secrets are ignored.
pub fn check_secrecy(transcript: &Transcript, secrets: &[NamedSecret]) -> Vec<SecrecyViolation> {
    scan(transcript.messages(), secrets)
}

fn scan(messages: &[WireMessage], secrets: &[NamedSecret]) -> Vec<SecrecyViolation> {
    let mut out = Vec::new();
    for msg in messages {
        for s in secrets {
            if s.bytes.is_empty() || s.bytes.len() > msg.payload.len() {
                continue;
            }
            if msg
                .payload
                .windows(s.bytes.len())
                .any(|w| w == s.bytes.as_slice())
            {
                out.push(SecrecyViolation {
                    seq: msg.seq,
                    secret: s.name.clone(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub seq: u64,
    pub kind: MessageKind,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioResult {
    pub secrecy_violations: Vec<SecrecyViolation>,
    pub replay_outcomes: Vec<ReplayOutcome>,
    pub registrations_completed: usize,
    pub registrations_rejected: usize,
    /// Sequence numbers of messages delivered after the adversary altered them.
    pub tampered: Vec<u64>,
    pub verifications_passed: usize,
    pub verifications_failed: usize,
    pub activity_appended: usize,
    pub activity_rejected: usize,
    pub messages: usize,
}

impl ScenarioResult {
    pub fn replays_rejected(&self) -> usize {
        self.replay_outcomes.iter().filter(|r| !r.accepted).count()
    }

    /// Flat `key=value` lines; list entries repeat their key.
    pub fn to_report(&self) -> String {
        let mut lines = vec![
            format!("messages={}", self.messages),
            format!("registrations_completed={}", self.registrations_completed),
            format!("registrations_rejected={}", self.registrations_rejected),
            format!("replays_attempted={}", self.replay_outcomes.len()),
            format!("replays_rejected={}", self.replays_rejected()),
            format!("tampered_messages={}", self.tampered.len()),
            format!("verifications_passed={}", self.verifications_passed),
            format!("verifications_failed={}", self.verifications_failed),
            format!("activity_appended={}", self.activity_appended),
            format!("activity_rejected={}", self.activity_rejected),
            format!("secrecy_violations={}", self.secrecy_violations.len()),
        ];
        for r in &self.replay_outcomes {
            let verdict = if r.accepted { "accepted" } else { "rejected" };
            lines.push(format!("replay={}:{}:{verdict}", r.seq, r.kind));
        }
        for seq in &self.tampered {
            lines.push(format!("tampered={seq}"));
        }
        for v in &self.secrecy_violations {
            lines.push(format!("violation={}:{}", v.seq, v.secret));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// What a service provider learns back from an activity report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityAck {
    pub appended: usize,
    /// Batch indices the trust center refused.
    pub rejected: Vec<usize>,
    /// False when no readable acknowledgment came back.
    pub delivered: bool,
}

struct SimDevice {
    uid: Vec<u8>,
    password: Vec<u8>,
    b_i: Vec<u8>,
    record: Option<DeviceRecord>,
}

struct Delivered {
    seq: u64,
    payload: Vec<u8>,
    replayed: bool,
}

/// One simulation run. Single threaded; every random choice is drawn from
/// generators seeded at construction.
pub struct Simulation {
    rng: ChaCha8Rng,
    clock: u64,
    transcript: Transcript,
    adversary: Adversary,
    tc_id: ActorId,
    secret: TrustCenterSecret,
    tc_store: TrustCenterStore,
    logs: BTreeMap<Vec<u8>, ActivityLog>,
    devices: Vec<SimDevice>,
    result: ScenarioResult,
}

impl Simulation {
    pub fn new(seed: u64, adversary: AdversaryMode) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let secret = TrustCenterSecret::generate(&mut rng);
        Simulation {
            rng,
            clock: EPOCH,
            transcript: Transcript::new(),
            adversary: Adversary::new(adversary),
            tc_id: ActorId::new(TRUST_CENTER),
            secret,
            tc_store: TrustCenterStore::new(),
            logs: BTreeMap::new(),
            devices: Vec::new(),
            result: ScenarioResult::default(),
        }
    }

    pub fn trust_center(&self) -> &ActorId {
        &self.tc_id
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn trust_center_store(&self) -> &TrustCenterStore {
        &self.tc_store
    }

    pub fn activity_log(&self, uid: &[u8]) -> Option<&ActivityLog> {
        self.logs.get(uid)
    }

    pub fn device_record(&self, uid: &[u8]) -> Option<&DeviceRecord> {
        self.devices
            .iter()
            .find(|d| d.uid == uid)
            .and_then(|d| d.record.as_ref())
    }

    pub fn now(&self) -> u64 {
        self.clock
    }

    fn tick(&mut self) -> u64 {
        let t = self.clock;
        self.clock += 1;
        t
    }

    /// Puts a message on the bus, lets the adversary act on it, and logs
    /// whatever actually reaches the receiver.
    fn send(
        &mut self,
        from: &ActorId,
        to: &ActorId,
        kind: MessageKind,
        payload: Vec<u8>,
        flippable: Option<&[usize]>,
    ) -> Vec<Delivered> {
        let (deliveries, tampered) = match self.adversary.intercept(kind, payload, flippable) {
            Interception::Deliver(p) => (vec![(p, false)], false),
            Interception::Tampered(p) => (vec![(p, false)], true),
            Interception::DeliverThenReplay(p) => (vec![(p.clone(), false), (p, true)], false),
        };
        let mut out = Vec::with_capacity(deliveries.len());
        for (payload, replayed) in deliveries {
            let ts = self.tick();
            let seq = self
                .transcript
                .push(from.clone(), to.clone(), kind, payload.clone(), ts);
            let msg = self
                .transcript
                .messages()
                .last()
                .expect("just pushed")
                .clone();
            self.adversary.observe(&msg);
            if tampered {
                self.result.tampered.push(seq);
            }
            out.push(Delivered {
                seq,
                payload,
                replayed,
            });
        }
        out
    }

    fn tc_handle_registration(&mut self, payload: &[u8]) -> Vec<u8> {
        let msg = match RegistrationMessage::from_payload(payload) {
            Ok(m) => m,
            Err(_) => return registration_response(STATUS_MALFORMED, None),
        };
        match tc_register(&msg, &self.secret, &mut self.tc_store) {
            Ok(rec) => registration_response(STATUS_OK, Some(&rec.d_i)),
            Err(RegistrationError::DuplicateIdentity(_)) => {
                registration_response(STATUS_DUPLICATE, None)
            }
            Err(_) => registration_response(STATUS_MALFORMED, None),
        }
    }

    /// Enrols a new device with the trust center. Returns whether the device
    /// ended up holding a stored credential.
    pub fn register_device(&mut self, uid: &[u8], password: &[u8]) -> Result<bool, SimError> {
        let ts = self.clock;
        let msg = device_enroll(uid, password, &mut self.rng, ts)?;
        let id = ActorId::new(format!("device-{}", self.devices.len()));
        let dev_idx = self.devices.len();
        self.devices.push(SimDevice {
            uid: uid.to_vec(),
            password: password.to_vec(),
            b_i: msg.b_i.clone(),
            record: None,
        });

        // Offsets of A_i and b_i inside the payload: the credential material.
        let a_off = 4 + uid.len() + 4;
        let b_off = a_off + 32 + 4;
        let flippable: Vec<usize> = (a_off..a_off + 32)
            .chain(b_off..b_off + msg.b_i.len())
            .collect();

        let tc = self.tc_id.clone();
        let requests = self.send(
            &id,
            &tc,
            MessageKind::Registration,
            msg.to_payload(),
            Some(&flippable),
        );
        let mut responses = Vec::new();
        for req in requests {
            let resp = self.tc_handle_registration(&req.payload);
            let accepted = resp.first() == Some(&STATUS_OK);
            if accepted {
                self.result.registrations_completed += 1;
            } else {
                self.result.registrations_rejected += 1;
            }
            if req.replayed {
                self.result.replay_outcomes.push(ReplayOutcome {
                    seq: req.seq,
                    kind: MessageKind::Registration,
                    accepted,
                });
            }
            responses.push(resp);
        }
        for resp in responses {
            for delivered in self.send(&tc, &id, MessageKind::Response, resp, None) {
                let dev = &mut self.devices[dev_idx];
                let fresh = dev.record.is_none();
                if fresh {
                    if let Some(d_i) = parse_registration_response(&delivered.payload) {
                        dev.record = Some(device_store(&dev.uid, &dev.password, d_i, &dev.b_i));
                    }
                }
                if delivered.replayed {
                    self.result.replay_outcomes.push(ReplayOutcome {
                        seq: delivered.seq,
                        kind: MessageKind::Response,
                        accepted: fresh,
                    });
                }
            }
        }
        Ok(self.devices[dev_idx].record.is_some())
    }

    fn tc_handle_activity(&mut self, payload: &[u8]) -> Vec<u8> {
        let Some(records) = decode_activity(payload) else {
            return vec![STATUS_MALFORMED];
        };
        let mut appended = 0;
        let mut rejected = Vec::new();
        for (i, rec) in records.into_iter().enumerate() {
            if !self.tc_store.contains(&rec.uid) {
                rejected.push(i);
                continue;
            }
            self.logs
                .entry(rec.uid.clone())
                .or_insert_with(|| ActivityLog::new(&rec.uid))
                .record_action(rec)
                .expect("log keyed by uid");
            appended += 1;
        }
        self.result.activity_appended += appended;
        self.result.activity_rejected += rejected.len();
        encode_ack(appended, &rejected)
    }

    /// Service provider `sp` ships activity rows to the trust center `tc`.
    /// Rows for devices the trust center has not registered are refused.
    pub fn report_activity(
        &mut self,
        sp: &ActorId,
        tc: &ActorId,
        records: &[ActivityRecord],
    ) -> Result<ActivityAck, SimError> {
        if *tc != self.tc_id {
            return Err(SimError::UnknownActor(tc.to_string()));
        }
        let requests = self.send(
            sp,
            tc,
            MessageKind::ActivityReport,
            encode_activity(records),
            None,
        );
        let mut responses = Vec::new();
        for req in requests {
            let resp = self.tc_handle_activity(&req.payload);
            if req.replayed {
                self.result.replay_outcomes.push(ReplayOutcome {
                    seq: req.seq,
                    kind: MessageKind::ActivityReport,
                    accepted: resp.first() == Some(&STATUS_OK),
                });
            }
            responses.push(resp);
        }
        let mut ack = None;
        for resp in responses {
            for delivered in self.send(tc, sp, MessageKind::Response, resp, None) {
                if ack.is_none() {
                    ack = decode_ack(&delivered.payload);
                }
            }
        }
        Ok(match ack {
            Some((appended, rejected)) => ActivityAck {
                appended,
                rejected,
                delivered: true,
            },
            None => ActivityAck {
                appended: 0,
                rejected: (0..records.len()).collect(),
                delivered: false,
            },
        })
    }

    /// Checks a device's stored credentials against the trust center's table.
    /// Devices without a stored credential fail.
    pub fn verify_device(&self, uid: &[u8]) -> bool {
        let Some(rec) = self.device_record(uid) else {
            return false;
        };
        matches!(
            verify_credentials(&rec.uid, &rec.p_i, &rec.b_i, &self.secret, &self.tc_store),
            Ok(true)
        )
    }

    /// Each device password, the trust center's `X`, and every `M_i` the
    /// trust center derived.
    pub fn default_secrets(&self) -> Vec<NamedSecret> {
        let mut secrets: Vec<NamedSecret> = self
            .devices
            .iter()
            .map(|d| {
                NamedSecret::new(
                    format!("P_i:{}", String::from_utf8_lossy(&d.uid)),
                    d.password.clone(),
                )
            })
            .collect();
        secrets.push(NamedSecret::new("X", self.secret.as_bytes().to_vec()));
        for rec in self.tc_store.iter() {
            let m_i = pseudonym(&rec.uid, &rec.b_i)
                .and_then(|puid| center_mask(&puid, &self.secret))
                .expect("stored fields are small");
            secrets.push(NamedSecret::new(
                format!("M_i:{}", String::from_utf8_lossy(&rec.uid)),
                m_i.as_bytes().to_vec(),
            ));
        }
        secrets
    }

    /// Runs the verification pass and the secrecy scan, then hands back the
    /// transcript and result.
    pub fn finish(mut self) -> (Transcript, ScenarioResult) {
        for dev in &self.devices {
            if self.verify_device(&dev.uid) {
                self.result.verifications_passed += 1;
            } else {
                self.result.verifications_failed += 1;
            }
        }
        let secrets = self.default_secrets();
        // An eavesdropper's view is what it recorded; otherwise scan the bus.
        self.result.secrecy_violations = if self.adversary.mode().mode == AdversaryKind::Eavesdrop {
            scan(self.adversary.observed(), &secrets)
        } else {
            check_secrecy(&self.transcript, &secrets)
        };
        self.result.messages = self.transcript.len();
        (self.transcript, self.result)
    }
}

/// Registers `n_devices` devices, has one service provider report a random
/// batch of activity for them, then verifies every device's credentials.
/// Identical arguments give byte-identical transcripts and results.
pub fn run_registration_scenario(
    n_devices: usize,
    adversary: AdversaryMode,
    seed: u64,
) -> Result<(Transcript, ScenarioResult), SimError> {
    if n_devices == 0 {
        return Err(SimError::NoDevices);
    }
    let mut sim = Simulation::new(seed, adversary);
    let mut uids = Vec::with_capacity(n_devices);
    for i in 0..n_devices {
        let uid = format!("dev-{i:03}").into_bytes();
        let mut raw = [0u8; 16];
        sim.rng.fill_bytes(&mut raw);
        let password = hex::encode(raw).into_bytes();
        sim.register_device(&uid, &password)?;
        uids.push(uid);
    }

    let mut batch = Vec::new();
    for uid in &uids {
        for _ in 0..sim.rng.gen_range(0..=3) {
            let kind = if sim.rng.gen_bool(0.7) {
                ActionKind::Positive
            } else {
                ActionKind::Negative
            };
            let age = sim.rng.gen_range(0..100);
            batch.push(ActivityRecord::new(uid, b"SP-0", kind, sim.clock - age));
        }
    }
    let sp = ActorId::new(SERVICE_PROVIDER);
    let tc = sim.tc_id.clone();
    sim.report_activity(&sp, &tc, &batch)?;
    Ok(sim.finish())
}
