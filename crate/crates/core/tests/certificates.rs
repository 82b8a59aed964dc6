use std::fs;

use sector_snake::ordering::{
    build_ordering, load_certificate, save_certificate, Certificate, CertificateError, OrderingKind,
};

#[test]
fn round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    for kind in OrderingKind::ALL {
        let o = build_ordering(kind, 6, Some(7)).unwrap();
        let path = dir.path().join(format!("{kind}.json"));
        save_certificate(&o, &path).unwrap();
        let back = load_certificate(&path).unwrap();
        assert_eq!(back.states(), o.states());
        assert_eq!(back.kind(), kind);
    }
}

#[test]
fn edited_state_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.json");
    save_certificate(&build_ordering(OrderingKind::Strict, 5, None).unwrap(), &path).unwrap();
    let mut cert: Certificate = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    cert.states.swap(10, 20);
    fs::write(&path, serde_json::to_string(&cert).unwrap()).unwrap();
    match load_certificate(&path) {
        Err(CertificateError::Validation { check, .. }) => assert_eq!(check, "adjacency"),
        other => panic!("expected adjacency failure, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_certificate(&dir.path().join("absent.json")), Err(CertificateError::Io(_))));
}
