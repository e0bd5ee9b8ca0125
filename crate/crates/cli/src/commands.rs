use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use lad_core::boolring::{MonomialOrder, OrderKind, VariableTable};
use lad_core::dataset::{
    binarize as cut_records, compute_thresholds, parse_records, PatternTable, PatternsDoc, RecordTable,
    ThresholdResult, Thresholds, ThresholdsDoc, VariableMap,
};
use lad_core::workflow::{
    drive, final_report, replay, start_session, verify_rules, DecisionTrace, PolicyDoc, PolicyProvider, Report,
    ReportContext, VerificationResult,
};
use lad_service::{router, ui_available, AppState, SessionConfig};

use crate::{InputArgs, OrderArgs, OrderName, RecordsArgs};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Mismatch(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Mismatch(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Mismatch(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

fn input<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(input(format!("cannot read {}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn read_records(records: &Path, map: &Path) -> Result<RecordTable, CliError> {
    let map = VariableMap::from_json(&read(map)?).map_err(input(map.display()))?;
    let file = fs::File::open(records).map_err(input(format!("cannot read {}", records.display())))?;
    parse_records(file, &map).map_err(input(records.display()))
}

fn read_thresholds(path: &Path) -> Result<ThresholdsDoc, CliError> {
    ThresholdsDoc::from_json(&read(path)?).map_err(input(path.display()))
}

/// Computed cuts with the file's cuts laid over them. When every feature is
/// overridden the class balance is not needed.
fn cuts_for(records: &RecordTable, overrides: Option<&Path>) -> Result<ThresholdResult, CliError> {
    let overrides = overrides.map(read_thresholds).transpose()?;
    match (compute_thresholds(records), overrides) {
        (Ok(r), None) => Ok(r),
        (Ok(mut r), Some(doc)) => {
            r.thresholds = r.thresholds.with_overrides(&doc.cuts).map_err(input("thresholds"))?;
            r.deviations.retain(|d| !doc.cuts.contains_key(&d.feature));
            Ok(r)
        }
        (Err(e), None) => Err(CliError::Input(e.to_string())),
        (Err(_), Some(doc)) => Ok(ThresholdResult {
            thresholds: Thresholds::from_map(&records.feature_names(), &doc.cuts).map_err(input("thresholds"))?,
            positives: records.positives(),
            deviations: Vec::new(),
        }),
    }
}

fn summary(p: &PatternTable) -> String {
    format!(
        "{} records, {} positive, {} patterns, 2^{} empty criteria",
        p.record_count(),
        p.class_positive_count(),
        p.observed_count(),
        p.unobserved_count()
    )
}

pub fn binarize(args: &RecordsArgs, out: &Path) -> Result<(), CliError> {
    let records = read_records(&args.records, &args.map)?;
    let result = cuts_for(&records, args.thresholds.as_deref())?;
    let patterns = cut_records(&records, &result.thresholds).map_err(input("binarize"))?;
    write(out, "patterns.json", &lad_core::doc::to_json_string(&patterns.to_doc()))?;
    write(
        out,
        "thresholds.json",
        &lad_core::doc::to_json_string(&result.thresholds.to_doc()),
    )?;
    write(
        out,
        "deviations.json",
        &lad_core::doc::to_json_string(&result.deviations_doc()),
    )?;
    println!("{}", summary(&patterns));
    for d in &result.deviations {
        println!(
            "tie at {} > {}: {} high instead of {}",
            d.feature, d.cut, d.realized_high, d.expected_high
        );
    }
    println!(
        "wrote patterns.json, thresholds.json, deviations.json to {}",
        out.display()
    );
    Ok(())
}

struct Loaded {
    patterns: PatternTable,
    records: Option<RecordTable>,
    thresholds: Option<Thresholds>,
}

fn load(args: &InputArgs) -> Result<Loaded, CliError> {
    if let Some(path) = &args.source.patterns {
        let patterns = PatternsDoc::from_json(&read(path)?)
            .and_then(|d| d.to_table())
            .map_err(input(path.display()))?;
        let thresholds = match &args.thresholds {
            Some(t) => {
                let names: Vec<&str> = patterns.table().features().iter().map(|v| v.name.as_str()).collect();
                Some(Thresholds::from_map(&names, &read_thresholds(t)?.cuts).map_err(input(t.display()))?)
            }
            None => None,
        };
        return Ok(Loaded {
            patterns,
            records: None,
            thresholds,
        });
    }
    let (Some(records), Some(map)) = (&args.source.records, &args.map) else {
        return Err(CliError::Input("give --patterns, or --records with --map".into()));
    };
    let records = read_records(records, map)?;
    let cuts = cuts_for(&records, args.thresholds.as_deref())?.thresholds;
    let patterns = cut_records(&records, &cuts).map_err(input("binarize"))?;
    Ok(Loaded {
        patterns,
        records: Some(records),
        thresholds: Some(cuts),
    })
}

fn order_for(args: &OrderArgs, table: &VariableTable) -> Result<MonomialOrder, CliError> {
    let kind = match args.order {
        OrderName::Deglex => OrderKind::DegLex,
        OrderName::Degrevlex => OrderKind::DegRevLex,
        OrderName::Lex => OrderKind::Lex,
    };
    let codes = args.precedence.clone().unwrap_or_else(|| table.codes());
    MonomialOrder::from_codes(kind, &codes, table).map_err(input(format!("precedence '{codes}'")))
}

fn print_verification(v: &VerificationResult) {
    println!("verified {} rules: {} mismatches", v.rules_checked, v.mismatches.len());
    for m in &v.mismatches {
        println!(
            "  {} {}: reported {}, recomputed {}",
            m.rule, m.field, m.reported, m.recomputed
        );
    }
}

pub fn analyze(
    args: &InputArgs,
    order: &OrderArgs,
    policy: Option<&str>,
    trace: Option<&Path>,
    out: &Path,
    verbose: bool,
) -> Result<(), CliError> {
    let loaded = load(args)?;
    let order = order_for(order, loaded.patterns.table())?;
    if verbose {
        eprintln!("{}", summary(&loaded.patterns));
    }
    let start = start_session(loaded.patterns.clone(), &order).map_err(input("session"))?;
    let (done, policy) = match trace {
        Some(path) => {
            let trace = DecisionTrace::from_json(&read(path)?).map_err(input(path.display()))?;
            let done = replay(&start, &trace).map_err(input(format!("replay of {}", path.display())))?;
            (done, None)
        }
        None => {
            let policy = PolicyDoc::parse(policy.unwrap_or("")).map_err(|e| CliError::Input(e.to_string()))?;
            let done = drive(&start, &mut PolicyProvider { policy }).map_err(input("policy run"))?;
            (done, Some(policy))
        }
    };
    let context = ReportContext {
        thresholds: loaded.thresholds.clone(),
        policy,
    };
    let report = final_report(&done, &context).map_err(|e| CliError::Io(e.to_string()))?;
    write(out, "report.json", &report.to_json())?;
    write(out, "report.md", &report.to_markdown())?;
    write(out, "trace.json", &done.trace().to_json())?;
    println!("{}", summary(&loaded.patterns));
    println!(
        "{} cycles, {} rules, {} generalizations, {} excised records",
        report.summary.cycles,
        report.rules.len(),
        report.generalizations.len(),
        report.summary.excised.len()
    );
    println!("wrote report.json, report.md, trace.json to {}", out.display());
    if let (Some(records), Some(cuts)) = (&loaded.records, &loaded.thresholds) {
        let v = verify_rules(&report, records, cuts).map_err(|e| CliError::Mismatch(e.to_string()))?;
        print_verification(&v);
        if !v.is_ok() {
            return Err(CliError::Mismatch(format!("{} mismatches", v.mismatches.len())));
        }
    }
    Ok(())
}

pub fn serve(args: &InputArgs, order: &OrderArgs, bind: &str, port: u16, ui: Option<&Path>) -> Result<(), CliError> {
    let loaded = load(args)?;
    let order = order_for(order, loaded.patterns.table())?;
    println!("{}", summary(&loaded.patterns));
    let state = AppState::new(SessionConfig {
        patterns: loaded.patterns,
        order,
        records: loaded.records,
        context: ReportContext {
            thresholds: loaded.thresholds,
            policy: None,
        },
    })
    .map_err(input("session"))?;
    let ui = ui.filter(|d| ui_available(d));
    if ui.is_none() {
        println!("review UI assets not found; serving the API only");
    }
    let app = router(state, ui);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((bind, port))
            .await
            .map_err(input(format!("cannot listen on {bind}:{port}")))?;
        let addr = listener.local_addr().map_err(|e| CliError::Io(e.to_string()))?;
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
        lad_service::serve(listener, app)
            .await
            .map_err(|e| CliError::Io(e.to_string()))
    })
}

pub fn verify(report: &Path, args: &RecordsArgs) -> Result<(), CliError> {
    let report = Report::from_json(&read(report)?).map_err(input(report.display()))?;
    let records = read_records(&args.records, &args.map)?;
    let names = records.feature_names();
    let cuts = match (&args.thresholds, &report.thresholds) {
        (Some(path), _) => Thresholds::from_map(&names, &read_thresholds(path)?.cuts).map_err(input(path.display()))?,
        (None, Some(embedded)) => Thresholds::from_map(&names, embedded).map_err(input("report thresholds"))?,
        (None, None) => cuts_for(&records, None)?.thresholds,
    };
    let v = verify_rules(&report, &records, &cuts).map_err(|e| CliError::Input(e.to_string()))?;
    print_verification(&v);
    if v.is_ok() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} mismatches", v.mismatches.len())))
    }
}

pub fn render(report: &Path, json: bool) -> Result<(), CliError> {
    let report = Report::from_json(&read(report)?).map_err(input(report.display()))?;
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_markdown());
    }
    Ok(())
}
