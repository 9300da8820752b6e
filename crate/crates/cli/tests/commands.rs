use std::collections::BTreeSet;

use serde_json::Value;

use dwork_cli::{run_from, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};

fn dwork(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dwork").chain(args.iter().copied());
    let code = run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn count_all_matches_golden_file() {
    let (code, out, _) = dwork(&["count", "--p", "7", "--n", "3", "--lambda", "1", "--method", "all", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, include_str!("golden/count_p7_n3_l1_all.json"));
}

#[test]
fn verify_matches_golden_file() {
    let (code, out, _) = dwork(&["verify", "--pmax", "5", "--n-set", "2,3", "--lambda", "all", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, include_str!("golden/verify_p5_n23.jsonl"));
}

#[test]
fn json_schema_keys() {
    let (_, out, _) = dwork(&["count", "--p", "13", "--n", "4", "--lambda", "2", "--method", "all", "--json", "--timings"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, BTreeSet::from(["p", "n", "lambda", "d", "methods", "agreement", "timings_ms"]));
    assert!(v["methods"].as_object().unwrap().values().all(Value::is_u64));
    let timed: BTreeSet<&str> = v["timings_ms"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(timed, BTreeSet::from(["ff", "koblitz", "main", "oracle"]));
}

#[test]
fn p_dividing_n_is_rejected() {
    let (code, out, err) = dwork(&["count", "--p", "7", "--n", "7", "--lambda", "1"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(out.is_empty());
    assert!(err.contains("p divides n: problem reduces to lambda=0 case"), "{err}");
}

#[test]
fn lambda_zero_routes_to_koblitz() {
    let (code, out, err) = dwork(&["count", "--p", "7", "--n", "4", "--lambda", "0", "--method", "main", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("koblitz"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["methods"].get("main").is_none());
    assert_eq!(v["methods"]["koblitz"], Value::from(dwork_core::brute_count(7, 4, 0)));
}

#[test]
fn negative_lambda_is_reduced() {
    let (_, a, _) = dwork(&["count", "--p", "11", "--n", "3", "--lambda", "-2", "--json"]);
    let (_, b, _) = dwork(&["count", "--p", "11", "--n", "3", "--lambda", "9", "--json"]);
    assert_eq!(a, b);
    assert!(a.contains("\"lambda\":9"));
}

#[test]
fn preconditions_of_specific_methods() {
    let (code, _, err) = dwork(&["count", "--p", "7", "--n", "4", "--lambda", "1", "--method", "relprime"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("gcd(p-1, n) = 2"));
    let (code, _, _) = dwork(&["count", "--p", "11", "--n", "4", "--lambda", "1", "--method", "ff"]);
    assert_eq!(code, EXIT_DOMAIN);
    let (code, _, _) = dwork(&["count", "--p", "9", "--n", "4", "--lambda", "1"]);
    assert_eq!(code, EXIT_DOMAIN);
}

#[test]
fn usage_errors() {
    assert_eq!(dwork(&["count", "--p", "7", "--n", "3"]).0, EXIT_USAGE);
    assert_eq!(dwork(&["count", "--p", "7", "--n", "3", "--lambda", "1", "--method", "magic"]).0, EXIT_USAGE);
    assert_eq!(dwork(&["gfun", "--p", "7", "--a", "1/x", "--b", "1", "--x", "1"]).0, EXIT_USAGE);
    assert_eq!(dwork(&["verify", "--pmax", "7", "--lambda", "some"]).0, EXIT_USAGE);
    assert_eq!(dwork(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(dwork(&["--help"]).0, EXIT_OK);
}

#[test]
fn precision_override_is_labelled() {
    let (code, out, _) =
        dwork(&["count", "--p", "31", "--n", "4", "--lambda", "5", "--method", "all", "--precision-override", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(mod 31^2)"), "{out}");
    let (_, json, _) = dwork(&["count", "--p", "31", "--n", "4", "--lambda", "5", "--precision-override", "2", "--json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["modulus"], "31^2");
    assert_eq!(v["methods"]["main"], Value::from(dwork_core::brute_count(31, 4, 5) % 961));
}

#[test]
fn gfun_depends_on_fractional_parts_only() {
    let (code, a, _) = dwork(&["gfun", "--p", "7", "--a", "1/2", "--b", "1", "--x", "3"]);
    assert_eq!(code, EXIT_OK);
    let (_, b, _) = dwork(&["gfun", "--p", "7", "--a", "3/2", "--b", "1", "--x", "3"]);
    let (_, c, _) = dwork(&["gfun", "--p", "7", "--a", "-1/2", "--b", "0", "--x", "3"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.contains("digits:"));
}

#[test]
fn gfun_at_zero() {
    let (code, out, _) = dwork(&["gfun", "--p", "7", "--a", "1/3,2/3", "--b", "1,1", "--x", "0", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["integer"], Value::from(0));
    assert_eq!(v["valuation"], Value::Null);
}

#[test]
fn ffun_matches_gfun_at_inverse_argument() {
    for (t, t_inv) in [(2, 4), (3, 5), (6, 6)] {
        let (code, f, _) = dwork(&["ffun", "--p", "7", "--a", "1/3,1/2", "--b", "1,1/6", "--x", &t.to_string(), "--json"]);
        assert_eq!(code, EXIT_OK);
        let (_, g, _) = dwork(&["gfun", "--p", "7", "--a", "1/3,1/2", "--b", "1,1/6", "--x", &t_inv.to_string(), "--json"]);
        let (mut f, mut g): (Value, Value) = (serde_json::from_str(&f).unwrap(), serde_json::from_str(&g).unwrap());
        for v in [&mut f, &mut g] {
            let o = v.as_object_mut().unwrap();
            o.remove("function");
            o.remove("x");
        }
        assert_eq!(f, g);
    }
}

#[test]
fn hyper_domain_errors() {
    let (code, _, err) = dwork(&["gfun", "--p", "7", "--a", "1/7", "--b", "1", "--x", "1"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("divisible by p"));
    let (code, _, _) = dwork(&["ffun", "--p", "7", "--a", "1/4", "--b", "1", "--x", "1"]);
    assert_eq!(code, EXIT_DOMAIN);
    let (code, _, _) = dwork(&["gfun", "--p", "7", "--a", "1/2,1/3", "--b", "1", "--x", "1"]);
    assert_eq!(code, EXIT_DOMAIN);
}

#[test]
fn empty_parameter_lists() {
    let (_, out, _) = dwork(&["gfun", "--p", "11", "--a", "", "--b", "", "--x", "1", "--json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["integer"], Value::from(-1));
}

#[test]
fn verify_text_summary() {
    let (code, out, _) = dwork(&["verify", "--pmax", "7", "--n-set", "3", "--lambda", "all"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("12 instances, 0 disagreements\n"), "{out}");
    let (_, out, _) = dwork(&["verify", "--pmax", "11", "--n-set", "4", "--lambda", "sample:3", "--json"]);
    // p = 3 has only two nonzero lambdas
    assert_eq!(out.lines().count(), 2 + 3 * 3);
}

#[test]
fn verify_is_independent_of_jobs() {
    let args = ["verify", "--pmax", "13", "--n-set", "2,3,4", "--lambda", "all", "--json"];
    let (_, serial, _) = dwork(&[&args[..], &["--jobs", "1"]].concat());
    let (_, parallel, _) = dwork(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(serial, parallel);
}
