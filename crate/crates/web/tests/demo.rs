use carmen_web::{analyze_kset_json, clue_distribution_json, play_halving_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn analysis_of_the_five_member_set() {
    let v = parse(analyze_kset_json(3, "57").unwrap());
    assert_eq!(v["degree"]["max_degree"], 3);
    assert_eq!(v["halving"]["passed"], true);
    assert!(v["halving"]["complexity"].as_u64().unwrap() <= 3);
    let h = v["entropy_bits"].as_f64().unwrap();
    assert!(h >= 0.0 && h <= 3f64.log2());
}

#[test]
fn minority_sets_get_degrees_only() {
    let v = parse(analyze_kset_json(3, "07").unwrap());
    assert_eq!(v["degree"]["size"], 3);
    assert!(v["halving"].is_null());
}

#[test]
fn play_trace_halves() {
    let v = parse(play_halving_json(3, "57", "1,2,3", true).unwrap());
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    for s in steps {
        assert!(s["remaining"].as_u64() > s["floor"].as_u64());
    }
    assert_eq!(steps[1]["remaining"], 2);
    assert_eq!(v["outcome"]["b"], "001");
    assert_eq!(v["outcome"]["suspects"], serde_json::json!([3]));
}

#[test]
fn clue_law_sums_to_one() {
    let v = parse(clue_distribution_json(3, "57").unwrap());
    assert_eq!(v["support_ok"], true);
}

#[test]
fn rejects_bad_input() {
    assert!(play_halving_json(3, "57", "1,2", false).is_err());
    assert!(play_halving_json(3, "57", "1,x,3", false).is_err());
    assert!(play_halving_json(3, "07", "1,2,3", false).is_err());
    assert!(analyze_kset_json(7, "0").is_err());
    assert!(analyze_kset_json(3, "zz").is_err());
}
