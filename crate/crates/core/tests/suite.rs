use escape_speed::config::RunConfig;
use escape_speed::regularity::{ReportRow, Verdict, REPORT_HEADER};
use escape_speed::orbit::CLASSIFICATION_HEADER;
use escape_speed::suite::{run_suite, seeds, FIXED_SEEDS};
use escape_speed::{Catalog, TowerReal};
use proptest::prelude::*;

const SMALL: &str = "\
[exp]
kind = closed_form
params = exp
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE

[lambda_exp_0.25]
kind = closed_form
params = lambda_exp lambda=0.25
";

fn config(threads: usize) -> RunConfig {
    RunConfig::parse(&format!(
        "eps_menu = 0.5\nk_menu = 2, 3, 5\nm_list = 1, 2\nhorizon = 12\nell_max = 3\nseed = 11\nseeds_per_fn = 6\nthreads = {threads}\n"
    ))
    .unwrap()
}

#[test]
fn same_config_gives_identical_csv() {
    let catalog = Catalog::parse(SMALL).unwrap();
    let a = run_suite(&catalog, &config(1)).unwrap();
    let b = run_suite(&catalog, &config(3)).unwrap();
    assert!(a.passed(), "{:?}", a.mismatches);
    assert_eq!(a.reports_csv(), b.reports_csv());
    assert_eq!(a.classifications_csv(), b.classifications_csv());
    assert!(a.reports_csv().starts_with(&format!("{REPORT_HEADER}\n")));
    assert!(a.classifications_csv().starts_with(&format!("{CLASSIFICATION_HEADER}\n")));
    // two fixed seeds plus six random ones for each function
    assert_eq!(a.classifications.len(), 2 * 8);
    for line in a.reports_csv().lines().skip(1) {
        let row: ReportRow = line.parse().unwrap();
        assert_eq!(row.to_string(), line);
    }

    let dir = std::env::temp_dir().join(format!("escape-suite-{}", std::process::id()));
    let (reports, classes) = a.write(&dir).unwrap();
    assert_eq!(std::fs::read_to_string(reports).unwrap(), a.reports_csv());
    assert_eq!(std::fs::read_to_string(classes).unwrap(), a.classifications_csv());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn wrong_expectation_is_a_mismatch() {
    let text = SMALL.replace(
        "expect.m_log.m1 = SATISFIED_ON_RANGE",
        "expect.m_log.m1 = VIOLATED",
    );
    let outcome = run_suite(&Catalog::parse(&text).unwrap(), &config(1)).unwrap();
    assert!(!outcome.passed());
    assert_eq!(outcome.mismatches.len(), 1);
    assert_eq!(outcome.mismatches[0].fn_name, "exp");
}

#[test]
fn seeds_depend_only_on_config() {
    let cfg = config(1);
    assert_eq!(seeds(&cfg, 0), seeds(&cfg, 0));
    assert_ne!(seeds(&cfg, 0), seeds(&cfg, 1));
    assert_eq!(&seeds(&cfg, 0)[..2], &FIXED_SEEDS[..]);
    let mut other = cfg.clone();
    other.seed = 12;
    assert_ne!(seeds(&cfg, 0), seeds(&other, 0));
}

#[test]
fn config_rejects_bad_menus() {
    assert!(RunConfig::parse("eps_menu = 1.5\n").is_err());
    assert!(RunConfig::parse("k_menu = 1\n").is_err());
    assert!(RunConfig::parse("horizon = 0\n").is_err());
    assert!(RunConfig::parse("m_list = 0\n").is_err());
    assert!(RunConfig::parse("colour = red\n").is_err());
    assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
}

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![
        Just(Verdict::SatisfiedOnRange),
        Just(Verdict::Violated),
        Just(Verdict::Inconclusive),
    ]
}

fn tower() -> impl Strategy<Value = TowerReal> {
    (0u32..5, 0.0f64..2.7).prop_map(|(l, m)| TowerReal::normalize(l, m.max(1.0)).unwrap())
}

proptest! {
    #[test]
    fn report_rows_round_trip(
        id in "[a-z_0-9]{1,12}",
        name in "[a-z_.0-9]{1,12}",
        m in prop::option::of(1u32..4),
        eps in prop::option::of(0.01f64..0.99),
        k in prop::option::of(1.01f64..20.0),
        q in prop::option::of(0.01f64..2.0),
        n in prop::option::of(0u32..4),
        verdict in verdict(),
        witness in "[a-z =0-9.;()T]{0,30}",
        lo in prop::option::of(tower()),
        hi in prop::option::of(tower()),
    ) {
        let row = ReportRow {
            condition_id: id,
            fn_name: name,
            m, eps, k, q, n,
            verdict,
            witness,
            range_lo: lo,
            range_hi: hi,
        };
        let back: ReportRow = row.to_string().parse().unwrap();
        prop_assert_eq!(back, row);
    }
}
