use itp_core::instance::{generate_random, load_instance, save_instance};
use itp_core::Error;

#[test]
fn json_and_csv_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_random(3, 4, (1, 20), (10, 50), (10, 50), 11).unwrap();
    for ext in ["json", "csv"] {
        let path = dir.path().join(format!("inst.{ext}"));
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back.to_data().cost_hi, inst.to_data().cost_hi);
        assert_eq!(back.supply(), inst.supply());
        assert_eq!(back.demand(), inst.demand());
    }
}

#[test]
fn unnamed_instance_takes_file_stem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.json");
    std::fs::write(
        &path,
        r#"{"m":1,"n":1,"cost_lo":[[1]],"cost_hi":[[2]],"supply_lo":[1],"supply_hi":[3],"demand_lo":[1],"demand_hi":[2]}"#,
    )
    .unwrap();
    assert_eq!(load_instance(&path).unwrap().name(), "tiny");
}

#[test]
fn missing_and_truncated_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_instance(dir.path().join("absent.json")), Err(Error::Io(_))));
    let path = dir.path().join("cut.json");
    std::fs::write(&path, r#"{"m":1,"n":1,"cost_lo":[[1]]"#).unwrap();
    assert!(matches!(load_instance(&path), Err(Error::Parse { .. })));
}
