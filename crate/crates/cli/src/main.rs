use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use verdict_core::argument::ArgumentError;
use verdict_core::bmca::{staged_update_with, BmcaError, ComputationMode, ModelEnsemble};
use verdict_core::bn::posterior_marginal;
use verdict_core::case::{emit_report, network_to_raw, parse_case_file, CaseError, CaseFile, ReportDocument, ReportFormat};
use verdict_core::display::significant;
use verdict_core::integrated::{integrated_query, merge_models, DivergenceSpec, IntegratedError, MODELS_NODE};
use verdict_core::{BnError, Evidence};

#[derive(Parser)]
#[command(name = "verdict", version, about = "Compare and average competing legal argument models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a case file and report every problem found.
    Validate { case: PathBuf },
    /// Score the models stage by stage.
    Run {
        case: PathBuf,
        #[arg(long)]
        mode: Option<ComputationMode>,
        /// Report only this stage (1-based).
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        /// Ignore fact-finder supplied plausibility and guilt values.
        #[arg(long)]
        computed: bool,
    },
    /// Merge the models into one network with a Models node.
    Merge {
        case: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Stage whose model versions and facts are used (1-based, default last).
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Posterior of one node under one model.
    Query {
        case: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long)]
        node: String,
        /// Observation as node=state; repeatable.
        #[arg(long = "evidence", value_parser = parse_observation)]
        evidence: Vec<(String, String)>,
        /// Stage whose model version is used (1-based, default last).
        #[arg(long)]
        stage: Option<usize>,
    },
}

/// Bad command-line input that the case file itself cannot catch.
#[derive(Debug)]
struct InvalidInput(String);

impl fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

fn parse_observation(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((n, v)) if !n.is_empty() && !v.is_empty() => Ok((n.to_string(), v.to_string())),
        _ => Err(format!("expected node=state, got '{s}'")),
    }
}

fn load(path: &Path) -> anyhow::Result<CaseFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_case_file(&text).with_context(|| format!("{} is not a valid case file", path.display()))
}

fn stage_index(cf: &CaseFile, stage: Option<usize>) -> anyhow::Result<usize> {
    let count = cf.stages.len();
    match stage {
        None if count == 0 => Err(invalid("case file has no stages")),
        None => Ok(count - 1),
        Some(n) if n >= 1 && n <= count => Ok(n - 1),
        Some(n) => Err(invalid(format!("stage {n} does not exist (case has {count})"))),
    }
}

fn validate(path: &Path) -> anyhow::Result<()> {
    let cf = load(path)?;
    let nodes: usize = cf.models.iter().map(|m| m.model.network.len()).sum();
    println!(
        "ok: {} model(s), {} node(s), {} stage(s), {} fact(s)",
        cf.models.len(),
        nodes,
        cf.stages.len(),
        cf.stages.len().checked_sub(1).map_or(0, |s| cf.fact_count(s))
    );
    Ok(())
}

fn run(path: &Path, mode: Option<ComputationMode>, stage: Option<usize>, format: ReportFormat, computed: bool) -> anyhow::Result<()> {
    let cf = load(path)?;
    let mode = mode.unwrap_or_else(|| cf.default_mode());
    let reports = staged_update_with(&cf, mode, !computed)?;
    let selected = match stage {
        Some(_) => {
            let i = stage_index(&cf, stage)?;
            &reports[i..=i]
        }
        None => &reports[..],
    };
    print!("{}", emit_report(&ReportDocument::new(&cf.name, mode, selected), format));
    Ok(())
}

fn merge(path: &Path, out: &Path, stage: Option<usize>) -> anyhow::Result<()> {
    let cf = load(path)?;
    let s = stage_index(&cf, stage)?;
    let factors = cf.models.iter().map(|m| m.weighting_factor).collect();
    let ensemble = ModelEnsemble::with_weighting_factors(cf.models_at(s)?, cf.priors(), factors)?;
    let div = DivergenceSpec::detect(&ensemble);
    let im = merge_models(&ensemble, &div)?;
    let raw = network_to_raw(&im.network);
    std::fs::write(out, serde_json::to_string_pretty(&raw)? + "\n").with_context(|| format!("writing {}", out.display()))?;

    let mut facts = Evidence::new();
    for f in cf.accumulated_facts(s) {
        facts.insert(f.node.clone(), f.state.clone());
    }
    let q = integrated_query(&im, &facts)?;
    println!(
        "merged {} model(s) into {} node(s) with {} switch(es); wrote {}",
        im.parties.len(),
        im.network.len(),
        im.switches.len(),
        out.display()
    );
    println!("given {} fact(s) through stage {}:", facts.len(), s + 1);
    let reference = cf.integrated_reference.as_ref();
    for (party, p) in &q.models {
        let cmp = reference
            .and_then(|r| r.models.get(party))
            .map(|r| format!("  (reference {})", significant(*r, 3)))
            .unwrap_or_default();
        println!("  P({MODELS_NODE}={party}) = {}{cmp}", significant(*p, 3));
    }
    let cmp = reference
        .map(|r| format!("  (reference {})", significant(r.guilt, 3)))
        .unwrap_or_default();
    println!("  P({}={}) = {}{cmp}", im.guilt_node, im.guilty_state, significant(q.guilt, 3));
    if let Some(note) = reference.and_then(|r| r.note.as_ref()) {
        println!("note: {note}");
    }
    Ok(())
}

fn query(path: &Path, party: &str, node: &str, observations: &[(String, String)], stage: Option<usize>) -> anyhow::Result<()> {
    let cf = load(path)?;
    let s = stage_index(&cf, stage)?;
    let Some(model) = cf.models_at(s)?.into_iter().find(|m| m.party == party) else {
        return Err(invalid(format!("unknown party '{party}' (expected one of {})", cf.parties().join(", "))));
    };
    let mut evidence = Evidence::new();
    for (n, v) in observations {
        if let Some(prev) = evidence.insert(n.clone(), v.clone()) {
            if &prev != v {
                bail!(invalid(format!("conflicting evidence for '{n}': '{prev}' vs '{v}'")));
            }
        }
    }
    let d = posterior_marginal(&model.network, node, &evidence)?;
    println!("P({node} | {} observation(s)) under {party}:", evidence.len());
    for (state, p) in d.states.iter().zip(&d.probabilities) {
        println!("  {state}\t{}\t{p}", significant(*p, 3));
    }
    Ok(())
}

fn is_validation(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<CaseError>()
            || c.is::<InvalidInput>()
            || matches!(
                c.downcast_ref::<BnError>(),
                Some(BnError::UnknownVariable(_) | BnError::UnknownState { .. } | BnError::QueryInEvidence(_))
            )
    })
}

fn is_zero_evidence(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<BmcaError>().is_some_and(BmcaError::is_zero_evidence)
            || matches!(c.downcast_ref::<BnError>(), Some(BnError::ZeroEvidence))
            || matches!(c.downcast_ref::<ArgumentError>(), Some(ArgumentError::Bn(BnError::ZeroEvidence)))
            || matches!(c.downcast_ref::<IntegratedError>(), Some(IntegratedError::Bn(BnError::ZeroEvidence)))
    })
}

fn report_error(e: &anyhow::Error) {
    eprintln!("error: {e:#}");
    if let Some(issues) = e.chain().find_map(|c| c.downcast_ref::<CaseError>()).map(CaseError::issues) {
        for i in issues {
            eprintln!("  {}: {}", i.path, i.message);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { case } => validate(case),
        Command::Run {
            case,
            mode,
            stage,
            format,
            computed,
        } => run(case, *mode, *stage, *format, *computed),
        Command::Merge { case, out, stage } => merge(case, out, *stage),
        Command::Query {
            case,
            model,
            node,
            evidence,
            stage,
        } => query(case, model, node, evidence, *stage),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            if is_zero_evidence(&e) {
                ExitCode::from(3)
            } else if is_validation(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
