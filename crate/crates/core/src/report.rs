//! Rendering a [`FailureReport`] as JSON, CSV or Markdown.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::failures::{fmt3, fmt3_opt, FailureReport, RankedVerb};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Md,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Md => "md",
        }
    }
}

/// `top_n` limits the Markdown tables; JSON and CSV always carry full lists.
pub fn render_report(report: &FailureReport, format: OutputFormat, top_n: usize) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Md => Ok(render_markdown(report, top_n)),
    }
}

pub fn parse_report_json(text: &str) -> Result<FailureReport> {
    Ok(serde_json::from_str(text)?)
}

fn render_csv(report: &FailureReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "list",
        "rank",
        "verb",
        "true_label",
        "predicted_label",
        "usage_count",
    ])?;
    let lists = [
        ("correct", &report.correct),
        ("false_passive", &report.false_passives),
        ("false_active", &report.false_actives),
    ];
    for (name, list) in lists {
        for (i, v) in list.iter().enumerate() {
            w.write_record([
                name,
                &(i + 1).to_string(),
                &v.verb,
                v.true_label.as_str(),
                v.predicted_label.as_str(),
                &v.usage_count.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_markdown(report: &FailureReport, top_n: usize) -> String {
    let m = &report.confusion;
    let mut out = String::from("# Failure report\n\n## Confusion matrix\n\n");
    out.push_str("| true \\ predicted | Active | Passive |\n|---|---:|---:|\n");
    let _ = writeln!(
        out,
        "| Active | {} | {} |",
        m.active_active, m.active_passive
    );
    let _ = writeln!(
        out,
        "| Passive | {} | {} |\n",
        m.passive_active, m.passive_passive
    );
    let _ = writeln!(out, "- test verbs: {}", m.total());
    let _ = writeln!(out, "- accuracy: {}", fmt3(m.accuracy()));
    let _ = writeln!(
        out,
        "- recall (active): {}",
        or_na(fmt3_opt(m.recall_active()))
    );
    let _ = writeln!(
        out,
        "- recall (passive): {}",
        or_na(fmt3_opt(m.recall_passive()))
    );

    section(&mut out, "Correct", &report.correct, top_n);
    section(&mut out, "False passives", &report.false_passives, top_n);
    section(&mut out, "False actives", &report.false_actives, top_n);
    out
}

fn or_na(s: String) -> String {
    if s.is_empty() {
        "n/a".into()
    } else {
        s
    }
}

fn section(out: &mut String, title: &str, list: &[RankedVerb], top_n: usize) {
    let _ = writeln!(out, "\n## {title}\n");
    if list.is_empty() {
        out.push_str("none\n");
        return;
    }
    for v in list.iter().take(top_n) {
        let _ = writeln!(out, "- {} ({})", v.verb, v.usage_count);
    }
    if list.len() > top_n {
        let _ = writeln!(out, "\n{} of {} shown", top_n, list.len());
    }
}
