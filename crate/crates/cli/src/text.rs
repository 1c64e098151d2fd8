//! Human-readable output.

use std::fmt::Write;

use qchan_core::diagnostics::Report;

/// `x` with 6 significant digits.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

/// Render rows as a left-aligned table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect(), &mut out);
    for row in rows {
        line(row.iter().map(|s| s.as_str()).collect(), &mut out);
    }
    out
}

/// The elementary-transition table of a report.
pub fn transition_table(report: &Report) -> String {
    let with_cost = report.total_cost.is_some();
    let mut header = vec!["#", "probability"];
    if with_cost {
        header.push("cost");
    }
    header.extend(["entropy [bits]", "schmidt", "support", "channel", "group"]);
    let rows: Vec<Vec<String>> = report
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = vec![i.to_string(), sig(t.probability)];
            if with_cost {
                row.push(t.cost.map(sig).unwrap_or_default());
            }
            let schmidt: Vec<String> = t.schmidt_coeffs.iter().map(|&c| sig(c)).collect();
            let group = report
                .degenerate_groups
                .iter()
                .position(|g| g.contains(&i))
                .map(|g| format!("degenerate {}", g + 1))
                .unwrap_or_default();
            row.extend([
                sig(t.entanglement_entropy),
                schmidt.join(" "),
                t.support_dim.to_string(),
                if t.is_channel { "yes" } else { "no" }.to_string(),
                group,
            ]);
            row
        })
        .collect();
    let mut out = table(&header, &rows);
    if let Some(total) = report.total_cost {
        let _ = writeln!(out, "total cost           {}", sig(total));
        let _ = writeln!(out, "sum p * cost         {}", sig(report.aggregated_cost.unwrap_or(f64::NAN)));
    }
    let _ = writeln!(out, "weighted entropy     {}", sig(report.weighted_entropy));
    out
}
