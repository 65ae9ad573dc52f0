use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lightedge_core::fuzzy::{parse_config, FuzzyConfig, FuzzyError};
use lightedge_core::registration::{
    device_enroll, device_store, tc_register, verify_credentials, DeviceStore, RegistrationError,
    TrustCenterSecret, TrustCenterStore,
};
use lightedge_core::sim::{run_registration_scenario, AdversaryMode, SimError};
use lightedge_core::store::{
    load_devices, load_or_create_secret, load_secret, load_trust_center, save_devices,
    save_trust_center, ActivityStore, StoreError,
};
use lightedge_core::trust::{
    assess_trust, qualify_with_widths, window_bounds, ActionKind, ActivityLog, ActivityRecord,
    TrustError, TrustReport, WindowConfig,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("device {0} is not registered")]
    NotRegistered(String),
    #[error("verification failed")]
    VerificationFailed,
    #[error("{0}")]
    Integrity(String),
    #[error(transparent)]
    Store(StoreError),
    #[error(transparent)]
    InvalidWindow(TrustError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotRegistered(_) | CliError::VerificationFailed => 3,
            CliError::Integrity(_) => 4,
            CliError::Store(StoreError::Io { .. }) => 1,
            CliError::Store(_) => 4,
            CliError::InvalidWindow(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        CliError::Store(e)
    }
}

impl From<RegistrationError> for CliError {
    fn from(e: RegistrationError) -> Self {
        match e {
            RegistrationError::InvalidIdentity => CliError::Usage(e.to_string()),
            RegistrationError::NotRegistered(uid) => {
                CliError::NotRegistered(String::from_utf8_lossy(&uid).into_owned())
            }
            other => CliError::Integrity(other.to_string()),
        }
    }
}

impl From<TrustError> for CliError {
    fn from(e: TrustError) -> Self {
        match e {
            TrustError::InvalidWindow { .. } => CliError::InvalidWindow(e),
            TrustError::UnknownKind(_) | TrustError::Fuzzy(FuzzyError::InvalidInput(_)) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Integrity(other.to_string()),
        }
    }
}

impl From<FuzzyError> for CliError {
    fn from(e: FuzzyError) -> Self {
        match e {
            FuzzyError::InvalidInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Integrity(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Registration(r) => r.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn load_fuzzy(path: Option<&Path>) -> Result<FuzzyConfig, CliError> {
    match path {
        None => Ok(FuzzyConfig::light_edge()),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| CliError::Integrity(format!("{}: {e}", p.display())))
        }
    }
}

pub fn fuzzy_eval(pos: f64, neg: f64, config: Option<&Path>) -> Result<String, CliError> {
    let cfg = load_fuzzy(config)?;
    Ok(format!("{:.6}\n", cfg.trust_score(pos, neg)?))
}

/// Files under the state directory.
pub struct State {
    dir: PathBuf,
}

impl State {
    pub fn new(dir: PathBuf) -> Self {
        State { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn ensure_dir(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", self.dir.display())))
    }

    fn trust_center(&self) -> Result<TrustCenterStore, CliError> {
        let p = self.path("trust_center.csv");
        if p.exists() {
            Ok(load_trust_center(&p)?)
        } else {
            Ok(TrustCenterStore::new())
        }
    }

    fn devices(&self) -> Result<DeviceStore, CliError> {
        let p = self.path("devices.csv");
        if p.exists() {
            Ok(load_devices(&p)?)
        } else {
            Ok(DeviceStore::new())
        }
    }

    fn secret(&self) -> Result<TrustCenterSecret, CliError> {
        let p = self.path("secret.hex");
        if !p.exists() {
            return Err(CliError::NotRegistered(
                "(no trust center secret yet; register a device first)".into(),
            ));
        }
        Ok(load_secret(&p)?)
    }

    fn activity(&self) -> Result<ActivityStore, CliError> {
        Ok(ActivityStore::open(self.path("activity.csv"))?)
    }

    fn require_registered(&self, uid: &str) -> Result<(), CliError> {
        if self.trust_center()?.contains(uid.as_bytes()) {
            Ok(())
        } else {
            Err(CliError::NotRegistered(uid.to_string()))
        }
    }

    pub fn register(&self, uid: &str, password: &str) -> Result<String, CliError> {
        self.ensure_dir()?;
        let mut rng = rand::rngs::OsRng;
        let mut tc = self.trust_center()?;
        let mut devices = self.devices()?;
        let secret = load_or_create_secret(&self.path("secret.hex"), &mut rng)?;
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let msg = device_enroll(uid.as_bytes(), password.as_bytes(), &mut rng, ts)?;
        let rec = tc_register(&msg, &secret, &mut tc)?;
        devices.put(device_store(
            uid.as_bytes(),
            password.as_bytes(),
            rec.d_i,
            &msg.b_i,
        ));
        save_trust_center(&self.path("trust_center.csv"), &tc)?;
        save_devices(&self.path("devices.csv"), &devices)?;
        Ok(format!("registered uid={uid} d_i={}\n", rec.d_i))
    }

    pub fn verify(&self, uid: &str, password: &str) -> Result<String, CliError> {
        let tc = self.trust_center()?;
        let stored = tc
            .get(uid.as_bytes())
            .ok_or_else(|| CliError::NotRegistered(uid.to_string()))?;
        // The device keeps b_i; fall back to the trust center's copy if the
        // device table is missing the row.
        let devices = self.devices()?;
        let b_i = devices
            .get(uid.as_bytes())
            .map(|d| d.b_i.clone())
            .unwrap_or_else(|| stored.b_i.clone());
        let secret = self.secret()?;
        if verify_credentials(uid.as_bytes(), password.as_bytes(), &b_i, &secret, &tc)? {
            Ok("verified\n".into())
        } else {
            Err(CliError::VerificationFailed)
        }
    }

    pub fn log_action(
        &self,
        uid: &str,
        sid: &str,
        kind: &str,
        time: u64,
    ) -> Result<String, CliError> {
        let kind: ActionKind = kind.parse()?;
        if sid.is_empty() {
            return Err(CliError::Usage("--sid must be non-empty".into()));
        }
        self.require_registered(uid)?;
        let mut store = self.activity()?;
        store.append(ActivityRecord::new(
            uid.as_bytes(),
            sid.as_bytes(),
            kind,
            time,
        ))?;
        Ok(format!("logged uid={uid} kind={kind} time={time}\n"))
    }

    pub fn trust(
        &self,
        uid: &str,
        now: u64,
        pos_boundary: u64,
        neg_boundary: u64,
        config: Option<&Path>,
    ) -> Result<String, CliError> {
        let fuzzy = load_fuzzy(config)?;
        let window = WindowConfig {
            pos_boundary,
            neg_boundary,
        };
        window_bounds(now, &window)?;
        self.require_registered(uid)?;
        let store = self.activity()?;
        let empty = ActivityLog::new(uid.as_bytes());
        let log = store.log(uid.as_bytes()).unwrap_or(&empty);
        let report = assess_trust(log, now, &window, &fuzzy)?;
        Ok(format!(
            "{}\n{}\n",
            TrustReport::CSV_HEADER,
            report.to_csv_row()
        ))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn trace(
        &self,
        uid: &str,
        from: u64,
        to: u64,
        step: u64,
        pos_window: u64,
        neg_window: u64,
        config: Option<&Path>,
    ) -> Result<String, CliError> {
        if step == 0 {
            return Err(CliError::Usage("--step must be positive".into()));
        }
        if from > to {
            return Err(CliError::Usage("--from must not exceed --to".into()));
        }
        if neg_window < pos_window {
            return Err(TrustError::InvalidWindow {
                w_p: pos_window,
                w_n: neg_window,
            }
            .into());
        }
        let fuzzy = load_fuzzy(config)?;
        self.require_registered(uid)?;
        let store = self.activity()?;
        let records = store
            .log(uid.as_bytes())
            .map(|l| l.records())
            .unwrap_or(&[]);
        let mut out = String::from("time,qualified_pos,qualified_neg,trust_degree\n");
        let mut t = from;
        loop {
            let (p, n) = qualify_with_widths(records, t, pos_window, neg_window);
            let score = fuzzy.trust_score(p as f64, n as f64)?;
            writeln!(out, "{t},{p},{n},{score:.6}").unwrap();
            match t.checked_add(step) {
                Some(next) if next <= to => t = next,
                _ => break,
            }
        }
        Ok(out)
    }

    pub fn simulate(
        &self,
        devices: usize,
        adversary: &str,
        seed: u64,
        target: &str,
        adversary_seed: Option<u64>,
        transcript: Option<PathBuf>,
    ) -> Result<String, CliError> {
        let mode = AdversaryMode::new(adversary.parse()?)
            .with_target(target.parse()?)
            .with_seed(adversary_seed.unwrap_or(seed));
        let (t, result) = run_registration_scenario(devices, mode, seed)?;
        let path = match transcript {
            Some(p) => p,
            None => {
                self.ensure_dir()?;
                self.path("transcript.csv")
            }
        };
        fs::write(&path, t.export())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(format!(
            "devices={devices}\nadversary={}\ntarget={}\nseed={seed}\n{}",
            mode.mode,
            mode.target_kind,
            result.to_report()
        ))
    }
}
