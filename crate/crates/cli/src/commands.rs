use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;

use gamma237::approx::{component_scan, find_conjugator_bfs, find_conjugator_guided, ConjugatorReport, ScanCell};
use gamma237::group::{generator_matrices, heptagonal_field, Gamma, LiftPoint, Mat2};
use gamma237::harness::{
    verify_pairs, ExperimentConfig, Matrix, OracleSpec, PairRecord, PairsReport,
};
use gamma237::orders::{abc_sign, cone_table, cone_violations, signs_over, ConeViolation, OrderOracle, ProductTable, Side, Sign};
use gamma237::realization::{build_realization, check_semiconjugacy, BlownPoint, BlowupMap, Defect, GapRecord, StandardAction};

use crate::output::{histogram_svg, OutDir};
use crate::{CliError, GlobalOpts, StrategyArg};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn load_config(opts: &GlobalOpts) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &opts.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(r) = opts.radius {
        cfg.ball_radius = r;
    }
    if let Some(l) = opts.budget_length {
        cfg.budget.max_word_length = l;
    }
    if let Some(o) = &opts.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn oracles(cfg: &ExperimentConfig, gamma: &Gamma) -> Result<Vec<(OracleSpec, OrderOracle)>, CliError> {
    Ok(cfg.oracles(gamma)?)
}

fn ratio(q: &BigRational) -> String {
    q.to_string()
}

#[derive(Serialize)]
struct GenCheckReport {
    version: &'static str,
    tower: Vec<String>,
    relations: Vec<gamma237::group::RelationCheck>,
    translation_numbers: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrices: Option<BTreeMap<String, Vec<Vec<String>>>>,
}

pub fn gen_check(opts: &GlobalOpts, perturb: bool) -> Result<String, CliError> {
    let field = heptagonal_field();
    let (a, b, c) = generator_matrices(&field);
    let a = if perturb {
        let eps = field.rational(BigRational::new(1.into(), 1000.into()));
        let [[p, q], [r, s]] = a.m.clone();
        Mat2::new(&p + &eps, q, r, s)
    } else {
        a
    };
    let gamma = Gamma::unchecked(field.clone(), a, b, c);
    let relations = gamma.relation_checks();
    let ok = relations.iter().all(|r| r.holds);
    let mut translation_numbers = BTreeMap::new();
    if ok {
        let (a, b, c) = gamma.generators();
        for (name, g) in [("a", &a), ("b", &b), ("c", &c), ("abc", gamma.abc())] {
            let t = g.translation_number().map_err(|e| CliError::Verification(e.to_string()))?;
            translation_numbers.insert(name.to_string(), ratio(&t));
        }
    }
    let matrices = opts.exact_matrices.then(|| gamma.exact_matrices().into_iter().collect());
    let report = GenCheckReport { version: VERSION, tower: field.descriptor(), relations, translation_numbers, matrices };
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(dir) = &opts.out {
        OutDir::create(dir)?.json("gen_check.json", &report)?;
    }
    if !ok {
        let _ = writeln!(std::io::stdout(), "{text}");
        let failed: Vec<String> = report.relations.iter().filter(|r| !r.holds).map(|r| r.relation.clone()).collect();
        return Err(CliError::Verification(format!("relations failed: {}", failed.join(", "))));
    }
    Ok(text)
}

fn parse_sides(sides: &[String]) -> Result<Vec<Side>, CliError> {
    sides
        .iter()
        .map(|s| match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            other => Err(CliError::Usage(format!("unknown side `{other}`"))),
        })
        .collect()
}

#[derive(Serialize)]
struct TableRow {
    word: String,
    length: usize,
    sign: Sign,
}

#[derive(Serialize)]
struct TableValidation<'a> {
    version: &'static str,
    oracle: &'a OracleSpec,
    radius: usize,
    entries: usize,
    /// Sign of the central element, spelled `abc` (the ball lists it as `aa`).
    abc_sign: Sign,
    violations: Vec<ConeViolation>,
}

pub fn table(
    opts: &GlobalOpts,
    basepoint: &str,
    tiebreak: &[String],
    reversed: bool,
    gap: Option<String>,
) -> Result<String, CliError> {
    let cfg = load_config(opts)?;
    let gamma = Gamma::standard();
    let spec = OracleSpec { basepoint: basepoint.to_string(), tiebreak: parse_sides(tiebreak)?, reversed, gap };
    let o = spec.build()?;
    let f = gamma.punctured_ball(cfg.ball_radius);
    let t = cone_table(&o, &f).map_err(|e| CliError::Verification(e.to_string()))?;
    let products = ProductTable::new(&f);
    let signs = signs_over(&o, &products).map_err(|e| CliError::Verification(e.to_string()))?;
    let violations = cone_violations(&products, &signs);
    let mut out = OutDir::create(&cfg.output_dir)?;
    out.json("cone_table.json", &t)?;
    out.csv("cone_table.csv", t.rows().map(|(word, length, sign)| TableRow { word, length, sign }))?;
    let n = violations.len();
    out.json(
        "table_validation.json",
        &TableValidation { version: VERSION, oracle: &spec, radius: cfg.ball_radius, entries: t.len(), abc_sign: abc_sign(&o, gamma), violations },
    )?;
    if n > 0 {
        return Err(CliError::Verification(format!("inconsistent oracle: {n} cone violations")));
    }
    Ok(format!("cone table: {} entries on ball({}), 0 violations -> {}", t.len(), cfg.ball_radius, cfg.output_dir.display()))
}

fn pair_record(target: usize, source: usize, r: Result<ConjugatorReport, gamma237::approx::ApproxError>) -> PairRecord {
    match r {
        Ok(report) => PairRecord { target, source, error: None, report: Some(report) },
        Err(e) => PairRecord { target, source, error: Some(e.to_string()), report: None },
    }
}

fn histogram(pairs: &[PairRecord]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for r in pairs.iter().filter_map(|p| p.report.as_ref()) {
        if let Some(l) = r.word_length {
            *h.entry(l).or_insert(0) += 1;
        }
    }
    h
}

#[derive(Serialize)]
struct HistRow {
    word_length: usize,
    pairs: usize,
}

fn write_histogram(out: &mut OutDir, hist: &BTreeMap<usize, usize>, title: &str) -> Result<(), CliError> {
    out.csv("histogram.csv", hist.iter().map(|(&word_length, &pairs)| HistRow { word_length, pairs }))?;
    out.text("histogram.svg", &histogram_svg(hist, title))
}

fn check_report(gamma: &Gamma, report: &PairsReport) -> Result<(), CliError> {
    let v = verify_pairs(gamma, report)?;
    if v.ok() {
        Ok(())
    } else {
        Err(CliError::Verification(v.failures.join("; ")))
    }
}

pub fn approximate(opts: &GlobalOpts, strategy: StrategyArg, plant: Option<&str>) -> Result<String, CliError> {
    let cfg = load_config(opts)?;
    let gamma = Gamma::standard();
    let mut specs: Vec<OracleSpec> = oracles(&cfg, gamma)?.into_iter().map(|x| x.0).collect();
    if let Some(w) = plant {
        gamma.parse(w).map_err(|e| CliError::Usage(e.to_string()))?;
        specs.push(specs[0].moved(w));
    }
    let built = specs.iter().map(OracleSpec::build).collect::<Result<Vec<_>, _>>()?;
    let f = gamma.punctured_ball(cfg.ball_radius);
    let budget = cfg.effective_budget();
    let pairs: Vec<PairRecord> = (1..built.len())
        .map(|j| {
            let r = match strategy {
                StrategyArg::Guided => find_conjugator_guided(gamma, &built[0], &built[j], &f, &budget),
                StrategyArg::Bfs => find_conjugator_bfs(gamma, &built[0], &built[j], &f, &budget),
            };
            pair_record(0, j, r)
        })
        .collect();
    let histogram = histogram(&pairs);
    let found = histogram.values().sum::<usize>();
    let report = PairsReport {
        version: VERSION.into(),
        config: cfg.clone(),
        f_radius: cfg.ball_radius,
        oracles: specs,
        pairs,
        histogram,
        matrix: None,
    };
    check_report(gamma, &report)?;
    let mut out = OutDir::create(&cfg.output_dir)?;
    out.json("approximate.json", &report)?;
    write_histogram(&mut out, &report.histogram, "witness word length")?;
    Ok(format!("approximate: {found} of {} searches found a verified conjugator -> {}", report.pairs.len(), cfg.output_dir.display()))
}

pub fn scan(opts: &GlobalOpts) -> Result<String, CliError> {
    let cfg = load_config(opts)?;
    let gamma = Gamma::standard();
    let pairs_in = oracles(&cfg, gamma)?;
    let specs: Vec<OracleSpec> = pairs_in.iter().map(|x| x.0.clone()).collect();
    let built: Vec<OrderOracle> = pairs_in.into_iter().map(|x| x.1).collect();
    let labels: Vec<String> = specs.iter().map(OracleSpec::label).collect();
    let f = gamma.punctured_ball(cfg.ball_radius);
    let s = component_scan(gamma, &labels, &built, &f, &cfg.effective_budget())
        .map_err(|e| CliError::Verification(e.to_string()))?;
    let pairs: Vec<PairRecord> =
        s.reports.iter().map(|(i, j, r)| PairRecord { target: *i, source: *j, error: None, report: Some(r.clone()) }).collect();
    let report = PairsReport {
        version: VERSION.into(),
        config: cfg.clone(),
        f_radius: cfg.ball_radius,
        oracles: specs,
        pairs,
        histogram: s.histogram.clone(),
        matrix: Some(Matrix {
            labels: s.labels.clone(),
            abc_signs: s.abc_signs.clone(),
            cells: s.cells.clone(),
            two_blocks: s.two_blocks,
        }),
    };
    check_report(gamma, &report)?;
    let mut out = OutDir::create(&cfg.output_dir)?;
    out.json("scan.json", &report)?;
    let header: Vec<String> = std::iter::once("target\\source".to_string()).chain((0..labels.len()).map(|j| j.to_string())).collect();
    let rows: Vec<Vec<String>> = s
        .cells
        .iter()
        .enumerate()
        .map(|(i, row)| {
            std::iter::once(i.to_string())
                .chain(row.iter().map(|c| match c {
                    ScanCell::Diagonal => "=".to_string(),
                    ScanCell::Found { length, .. } => length.to_string(),
                    ScanCell::NotFound => "?".to_string(),
                    ScanCell::Obstructed => "x".to_string(),
                }))
                .collect()
        })
        .collect();
    out.csv_records("scan_matrix.csv", &header, &rows)?;
    write_histogram(&mut out, &s.histogram, "witness word length")?;
    let not_found = s.cells.iter().flatten().filter(|c| **c == ScanCell::NotFound).count();
    Ok(format!(
        "scan: {} orders, two blocks: {}, unresolved pairs: {not_found} -> {}",
        labels.len(),
        s.two_blocks,
        cfg.output_dir.display()
    ))
}

#[derive(Serialize)]
struct BlowupReport {
    version: &'static str,
    config: ExperimentConfig,
    basepoint: OracleSpec,
    orbit_radius: usize,
    inserted: usize,
    total_length: String,
    defect: Defect,
    orbit_order_preserved: bool,
    gaps: Vec<GapRecord>,
}

pub fn blowup(opts: &GlobalOpts) -> Result<String, CliError> {
    use rand::{Rng, SeedableRng};
    let cfg = load_config(opts)?;
    let gamma = Gamma::standard();
    let (spec, o) = oracles(&cfg, gamma)?.remove(0);
    let p = o.basepoint().clone();
    let r = cfg.ball_radius;
    if 2 * r > cfg.ball_cap {
        return Err(CliError::Usage(format!("blowup needs ball({}) within ball_cap {}", 2 * r, cfg.ball_cap)));
    }
    let els = gamma.ball(r);
    let b = BlowupMap::orbit_sample(&p, &gamma.ball(2 * r));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sample: Vec<BlownPoint> = Vec::new();
    while sample.len() < cfg.sample_size.max(2) {
        let pt = if sample.len().is_multiple_of(2) {
            let h = &els[rng.gen_range(0..els.len())];
            BlownPoint::new(h.apply(&p), Some(BigRational::new(rng.gen_range(0..=16).into(), 16.into())))
        } else {
            let x = LiftPoint::from_rational(
                rng.gen_range(-2..=2),
                BigRational::new(rng.gen_range(-1000i64..=1000).into(), 1000.into()),
                BigRational::new(rng.gen_range(1i64..=1000).into(), 1000.into()),
            );
            if b.is_blown_up(&x) {
                continue;
            }
            BlownPoint::new(x, None)
        };
        sample.push(pt.expect("fraction in range"));
    }
    let defect = check_semiconjugacy(|x: &BlownPoint| b.collapse(x), &StandardAction::default(), &b, &sample, &els)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    let qp = BlownPoint::new(p.clone(), Some(BigRational::new(1.into(), 2.into()))).expect("fraction in range");
    let mut preserved = true;
    for u in &els {
        for v in &els {
            let (bu, bv) = (b.act(u, &qp), b.act(v, &qp));
            let ok = matches!((&bu, &bv), (Ok(x), Ok(y)) if x.cmp_exact(y) == u.apply(&p).cmp_exact(&v.apply(&p)));
            preserved &= ok;
        }
    }
    let report = BlowupReport {
        version: VERSION,
        config: cfg.clone(),
        basepoint: spec,
        orbit_radius: 2 * r,
        inserted: b.len(),
        total_length: ratio(&b.total_length()),
        defect: defect.clone(),
        orbit_order_preserved: preserved,
        gaps: b.gaps(),
    };
    let mut out = OutDir::create(&cfg.output_dir)?;
    out.json("blowup.json", &report)?;
    let rows: Vec<Vec<String>> = report
        .gaps
        .iter()
        .map(|g| vec![g.orbit_point.to_string(), g.gap[0].to_string(), g.gap[1].to_string(), g.length.clone()])
        .collect();
    out.csv_records("gaps.csv", &["orbit_point", "gap_lo", "gap_hi", "length"].map(String::from), &rows)?;
    if !defect.exact_zero || !preserved {
        return Err(CliError::Verification(format!("defect {} / order preserved {preserved}", defect.max)));
    }
    Ok(format!(
        "blowup: {} gaps, defect 0 over {} checks, orbit order preserved -> {}",
        b.len(),
        defect.checked,
        cfg.output_dir.display()
    ))
}

#[derive(Serialize)]
struct RealizeReport {
    version: &'static str,
    config: ExperimentConfig,
    oracle: OracleSpec,
    stage: usize,
    placed: usize,
    breakpoints: BTreeMap<String, usize>,
    round_trip_checked: usize,
    round_trip_ok: bool,
}

pub fn realize(opts: &GlobalOpts) -> Result<String, CliError> {
    let cfg = load_config(opts)?;
    let gamma = Gamma::standard();
    let (spec, o) = oracles(&cfg, gamma)?.remove(0);
    let n = cfg.ball_radius;
    let r = build_realization(&o, gamma, n, None).map_err(|e| CliError::Verification(e.to_string()))?;
    let inner = if n == 0 { Vec::new() } else { gamma.punctured_ball(n - 1) };
    let expected = cone_table(&o, &inner).map_err(|e| CliError::Verification(e.to_string()))?;
    let ok = inner.iter().all(|h| r.sign_of(h.word()) == expected.get(h.word()));
    let breakpoints = [gamma237::group::Letter::A, gamma237::group::Letter::B, gamma237::group::Letter::C]
        .iter()
        .map(|&l| (format!("{l:?}").to_lowercase(), r.extension(l).breakpoints().len()))
        .collect();
    let report = RealizeReport {
        version: VERSION,
        config: cfg.clone(),
        oracle: spec,
        stage: n,
        placed: r.elements().len(),
        breakpoints,
        round_trip_checked: inner.len(),
        round_trip_ok: ok,
    };
    let mut out = OutDir::create(&cfg.output_dir)?;
    out.csv("realization.csv", r.rows())?;
    out.json("realization.json", &report)?;
    if !ok {
        return Err(CliError::Verification("realization does not reproduce the cone table".into()));
    }
    Ok(format!("realize: stage {n}, {} elements placed, round trip ok -> {}", r.elements().len(), cfg.output_dir.display()))
}

pub fn verify(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)?;
    let report: PairsReport = serde_json::from_str(&text)?;
    let gamma = Gamma::standard();
    let v = verify_pairs(gamma, &report)?;
    let summary = serde_json::to_string_pretty(&v)?;
    if !v.ok() {
        let _ = writeln!(std::io::stdout(), "{summary}");
        return Err(CliError::Verification(format!("{} of {} witnesses failed", v.failures.len(), v.witnesses)));
    }
    Ok(summary)
}
