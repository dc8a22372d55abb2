use adele_trace::commands::{Cli, Invocation};
use adele_trace::config::{self, ExperimentConfig};
use adele_trace::suites;
use anyhow::Result;
use clap::Parser;
use std::path::Path;
use std::process::ExitCode;

fn run_single(config: &ExperimentConfig, save: Option<&Path>) -> Result<bool> {
    if let Some(path) = save {
        config.save(path)?;
    }
    let record = config::run(config)?;
    println!("{}", record.to_json()?);
    if config.output.as_ref().and_then(|o| o.csv.as_ref()).is_none() {
        if let Some(t) = &record.table {
            eprint!("{}", t.to_csv()?);
        }
    }
    Ok(record.pass)
}

fn run_suite(name: &str, csv: Option<&Path>, json: Option<&Path>) -> Result<bool> {
    let report = suites::run_suite(name)?;
    print!("{}", report.summary().to_csv()?);
    if let Some(path) = csv {
        for (i, table) in report.details().iter().enumerate() {
            if i == 0 {
                table.write(path)?;
            } else {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("details");
                table.write(&path.with_file_name(format!("{stem}-{}.csv", i + 1)))?;
            }
        }
    }
    if let Some(path) = json {
        let records: Vec<_> = report.members.iter().map(|m| &m.record).collect();
        std::fs::write(path, adele_trace::output::to_json(&records)?)?;
    }
    let failures = report.failures();
    if !failures.is_empty() {
        eprintln!("suite `{name}`: {} failed: {}", failures.len(), failures.join("; "));
    }
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let save = cli.save_config.clone();
    let (csv, json) = (cli.csv.clone(), cli.json.clone());
    let result = match cli.invocation() {
        Invocation::Single(c) => run_single(&c, save.as_deref()),
        Invocation::Config(path) => ExperimentConfig::load(&path).and_then(|c| run_single(&c, save.as_deref())),
        Invocation::Suite(name) => run_suite(&name, csv.as_deref(), json.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
