use std::path::PathBuf;

use sector_snake::experiments::scan::ScanGrid;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_grids_match_builtins() {
    assert_eq!(ScanGrid::load(&config("fine_scan.json")).unwrap(), ScanGrid::reproduction());
    assert_eq!(ScanGrid::load(&config("fine_scan_wide.json")).unwrap(), ScanGrid::wide());
}
