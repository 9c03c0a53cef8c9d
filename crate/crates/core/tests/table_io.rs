use ikit_core::table::TableFormat;
use ikit_core::{Error, ValueTable};
use proptest::prelude::*;

proptest! {
    #[test]
    fn both_formats_round_trip(values in (0usize..=8).prop_flat_map(|n| prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1 << n))) {
        let vt = ValueTable::from_vec(values).unwrap();
        for format in [TableFormat::Json, TableFormat::Binary] {
            let bytes = vt.save(format);
            let back = ValueTable::load(&bytes, format).unwrap();
            prop_assert_eq!(back.values(), vt.values());
            let auto = ValueTable::load_auto(&bytes).unwrap();
            prop_assert_eq!(auto.values(), vt.values());
        }
        prop_assert_eq!(vt.digest(), ValueTable::load(&vt.save(TableFormat::Json), TableFormat::Json).unwrap().digest());
    }

    #[test]
    fn truncated_binary_is_rejected(n in 1usize..6, cut in 1usize..8) {
        let vt = ValueTable::from_vec(vec![1.5; 1 << n]).unwrap();
        let bytes = vt.save(TableFormat::Binary);
        let short = &bytes[..bytes.len() - cut];
        prop_assert!(ValueTable::load(short, TableFormat::Binary).is_err());
    }
}

#[test]
fn file_round_trip_by_extension() {
    let dir = std::env::temp_dir().join(format!("ikit-table-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let vt = ValueTable::from_vec(vec![0.0, 1.0, 2.0, 5.0]).unwrap();
    for name in ["g.json", "g.bin", "g.vtbl"] {
        let path = dir.join(name);
        vt.write_file(&path).unwrap();
        assert_eq!(ValueTable::read_file(&path).unwrap().values(), vt.values());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn wrong_length_json() {
    let doc = br#"{"format":"vtable","version":1,"n":2,"values":[0,1,2]}"#;
    let err = ValueTable::load(doc, TableFormat::Json).unwrap_err();
    assert!(matches!(err, Error::LengthMismatch { expected: 4, actual: 3 }), "{err}");
}
