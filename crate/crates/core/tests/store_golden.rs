use std::path::Path;

use lightedge_core::registration::{
    device_enroll_with_nonce, device_store, tc_register, DeviceStore, TrustCenterSecret,
    TrustCenterStore,
};
use lightedge_core::store::{
    format_device_rows, format_trust_center_rows, load_devices, load_trust_center, ActivityStore,
};
use lightedge_core::trust::{ActionKind, ActivityRecord};

const TC_GOLDEN: &str = include_str!("golden/trust_center.csv");
const DEVICE_GOLDEN: &str = include_str!("golden/devices.csv");
const ACTIVITY_GOLDEN: &str = include_str!("golden/activity.csv");

fn golden(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn fixture() -> (TrustCenterStore, DeviceStore) {
    let secret = TrustCenterSecret::from_bytes([0u8; 32]);
    let mut tc = TrustCenterStore::new();
    let mut devices = DeviceStore::new();
    let rows: [(&[u8], &[u8], [u8; 16]); 3] = [
        (b"dev1", b"pw", [0; 16]),
        (b"meter 12,east", b"p%w,\n", [0xab; 16]),
        (b"\xffraw", b"x", [7; 16]),
    ];
    for (uid, pw, b) in rows {
        let msg = device_enroll_with_nonce(uid, pw, &b, 0).unwrap();
        let rec = tc_register(&msg, &secret, &mut tc).unwrap();
        devices.put(device_store(uid, pw, rec.d_i, &b));
    }
    (tc, devices)
}

#[test]
fn trust_center_rows_match_golden_file() {
    let (tc, _) = fixture();
    assert_eq!(format_trust_center_rows(&tc), TC_GOLDEN);
    let loaded = load_trust_center(&golden("trust_center.csv")).unwrap();
    assert_eq!(format_trust_center_rows(&loaded), TC_GOLDEN);
}

#[test]
fn device_rows_match_golden_file() {
    let (_, devices) = fixture();
    assert_eq!(format_device_rows(&devices), DEVICE_GOLDEN);
    let loaded = load_devices(&golden("devices.csv")).unwrap();
    assert_eq!(format_device_rows(&loaded), DEVICE_GOLDEN);
}

#[test]
fn activity_log_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("activity.csv");
    let mut store = ActivityStore::open(&path).unwrap();
    for (uid, sid, kind, t) in [
        (&b"dev1"[..], &b"SP-0"[..], ActionKind::Positive, 100),
        (b"dev1", b"SP-0", ActionKind::Negative, 250),
        (b"meter 12,east", b"SP 1", ActionKind::Positive, 300),
    ] {
        store
            .append(ActivityRecord::new(uid, sid, kind, t))
            .unwrap();
    }
    assert_eq!(std::fs::read_to_string(&path).unwrap(), ACTIVITY_GOLDEN);

    let replayed = ActivityStore::open(golden("activity.csv")).unwrap();
    let dev1 = replayed.log(b"dev1").unwrap();
    assert_eq!(dev1.records().len(), 2);
    assert_eq!(dev1.records()[1].kind, ActionKind::Negative);
    assert_eq!(
        replayed.log(b"meter 12,east").unwrap().records()[0].action_time,
        300
    );
}
