//! Plain-text and CSV renderings of solver and settlement output.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use crate::model::{Instance, LseId, PaymentSchedule, Selection};
use crate::payments::SettlementReport;
use crate::verify::Verdict;
use crate::welfare::WelfareBreakdown;

fn id_set(ids: &[LseId]) -> String {
    let inner: Vec<String> = ids.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

fn list<T: ToString>(items: &[T]) -> String {
    let inner: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", inner.join(", "))
}

pub fn write_solve(
    out: &mut dyn Write,
    inst: &Instance,
    sel: &Selection,
    welfare: &WelfareBreakdown,
    schedules: &[PaymentSchedule],
) -> std::io::Result<()> {
    writeln!(out, "selection: {sel}")?;
    writeln!(out, "expected_welfare: {}", welfare.total)?;
    writeln!(out, "rank,lse_id,v,gamma,contribution")?;
    for (rank, (id, contribution)) in welfare.per_member.iter().enumerate() {
        let bid = inst.bid(*id);
        writeln!(
            out,
            "{},{},{},{},{}",
            rank + 1,
            id,
            bid.v_hat(),
            bid.gamma_hat(),
            contribution
        )?;
    }
    writeln!(out, "payments:")?;
    for s in schedules {
        writeln!(
            out,
            "lse {}: case={} t_day_ahead={} t_realtime={}",
            s.lse_id,
            s.case,
            s.t_day_ahead,
            list(&s.t_realtime)
        )?;
    }
    Ok(())
}

pub fn write_settlement(out: &mut dyn Write, report: &SettlementReport) -> std::io::Result<()> {
    writeln!(out, "w: {}", report.realized_w)?;
    writeln!(out, "served: {}", id_set(&report.served))?;
    writeln!(out, "deselected: {}", id_set(&report.deselected))?;
    writeln!(out, "lse_id,utility,net_transfer,payoff")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.lse_id, row.utility, row.net_transfer, row.payoff
        )?;
    }
    writeln!(out, "generator_revenue: {}", report.generator_revenue)
}

pub fn write_verdict(out: &mut dyn Write, verdict: &Verdict) -> std::io::Result<()> {
    let status = if verdict.passed { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{status} {} ({} relations)",
        verdict.check, verdict.evaluated
    )?;
    if let Some(w) = &verdict.witness {
        writeln!(out, "  witness: {w}")?;
    }
    for note in &verdict.notes {
        writeln!(out, "  note: {note}")?;
    }
    Ok(())
}

/// `schedules.csv` (one row per LSE and level) and `summary.csv`.
pub fn write_csv(dir: &Path, schedules: &[PaymentSchedule]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("schedules.csv");
    let mut rows =
        csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    rows.write_record(["lse_id", "w", "t_realtime"])?;
    for s in schedules {
        for (w, t) in s.t_realtime.iter().enumerate() {
            rows.write_record([s.lse_id.to_string(), w.to_string(), t.to_string()])?;
        }
    }
    rows.flush()?;

    let path = dir.join("summary.csv");
    let mut summary =
        csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    summary.write_record(["lse_id", "t_day_ahead", "case"])?;
    for s in schedules {
        summary.write_record([
            s.lse_id.to_string(),
            s.t_day_ahead.to_string(),
            s.case.to_string(),
        ])?;
    }
    summary.flush()?;
    Ok(())
}
