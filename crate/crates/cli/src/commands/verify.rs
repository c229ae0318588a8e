use angulus::inequality::{
    recover_unweighted, verify_unweighted, verify_weighted, FixedPointMultiplier, InequalityReport, MultiplierData,
    Verdict, WeightVector, CSV_HEADER,
};
use angulus::koenigs::build_koenigs_map;
use serde::Serialize;

use super::estimate_all;
use crate::output::{write_csv, write_json};
use crate::scenario::{ensure_out, MultiplierTable, Scenario};
use crate::Outcome;

#[derive(Debug, Serialize)]
struct Row {
    source: &'static str,
    t: Option<f64>,
    label: String,
    report: InequalityReport,
}

fn table_data(table: &MultiplierTable) -> anyhow::Result<MultiplierData> {
    let point = |m: f64, e: Option<f64>| match e {
        Some(e) => FixedPointMultiplier::estimated(None, m, e),
        None => FixedPointMultiplier::exact(None, m.ln()),
    };
    if table.denjoy_wolff <= 0.0 || table.repulsive.iter().any(|m| *m <= 0.0) {
        return Err(angulus::Error::InvalidInput("multipliers must be positive".into()).into());
    }
    if let Some(errs) = &table.repulsive_errors {
        if errs.len() != table.repulsive.len() {
            return Err(angulus::Error::InvalidInput("one error per repulsive multiplier is required".into()).into());
        }
    }
    let repulsive = table
        .repulsive
        .iter()
        .enumerate()
        .map(|(k, m)| point(*m, table.repulsive_errors.as_ref().map(|e| e[k])))
        .collect();
    Ok(MultiplierData::new(point(table.denjoy_wolff, table.denjoy_wolff_error), repulsive)?)
}

fn rows_for(
    source: &'static str,
    t: Option<f64>,
    data: &MultiplierData,
    weights: &[WeightVector],
    widths: Option<&[f64]>,
) -> anyhow::Result<Vec<Row>> {
    let row = |label: String, report| Row {
        source,
        t,
        label,
        report,
    };
    let mut rows = vec![row("unweighted".into(), verify_unweighted(data)?)];
    for (i, w) in weights.iter().enumerate() {
        rows.push(row(format!("weights[{i}]"), verify_weighted(data, w)?));
    }
    if let Some(widths) = widths {
        rows.push(row("matched".into(), verify_weighted(data, &WeightVector::new(widths.to_vec())?)?));
    }
    rows.push(row("optimal".into(), recover_unweighted(data)?));
    Ok(rows)
}

pub fn verify(s: &Scenario, exact_only: bool) -> anyhow::Result<Outcome> {
    let weights = s
        .weights
        .iter()
        .map(|w| WeightVector::new(w.clone()))
        .collect::<angulus::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    if let Some(table) = &s.multipliers {
        let data = table_data(table)?;
        rows.extend(rows_for("table", None, &data, &weights, None)?);
    }
    if let Some(dom) = &s.domain {
        let map = build_koenigs_map(dom, s.tolerance)?;
        for &t in &s.times {
            let exact = map.exact_multipliers(t)?;
            rows.extend(rows_for("exact", Some(t), &exact, &weights, Some(dom.alphas()))?);
            if !exact_only {
                let est = estimate_all(&map, t)?;
                let mut points = est
                    .iter()
                    .map(|(p, d)| FixedPointMultiplier::estimated(Some(*p), d.multiplier, d.error));
                let dw = points.next().expect("Denjoy-Wolff estimate");
                let data = MultiplierData::new(dw, points.collect())?;
                rows.extend(rows_for("estimated", Some(t), &data, &weights, Some(dom.alphas()))?);
            }
        }
    }

    ensure_out(&s.out)?;
    write_json(&s.out.join("inequality_report.json"), &rows)?;
    let header: Vec<&str> = ["source", "t", "label"].into_iter().chain(CSV_HEADER).collect();
    write_csv(
        &s.out.join("inequality_report.csv"),
        &header,
        rows.iter().map(|r| {
            let mut line = vec![r.source.to_string(), r.t.map(|t| t.to_string()).unwrap_or_default(), r.label.clone()];
            line.extend(r.report.csv_row());
            line
        }),
    )?;

    let verdicts: Vec<Verdict> = rows.iter().map(|r| r.report.verdict).collect();
    Ok(if verdicts.contains(&Verdict::No) {
        Outcome::Violated
    } else if verdicts.contains(&Verdict::Indeterminate) {
        Outcome::Indeterminate
    } else {
        Outcome::Ok
    })
}
