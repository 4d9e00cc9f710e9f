//! Report rendering shared by the command line and tests.

use crate::entanglement::GemCertificate;
use crate::error::Result;

pub const CSV_HEADER: &str = "construction,code,n,t,m,epsilon_prime,bound_bits,alpha_effective";

pub fn certificate_json(cert: &GemCertificate) -> Result<String> {
    Ok(serde_json::to_string_pretty(cert)?)
}

pub fn certificate_csv_row(cert: &GemCertificate) -> String {
    format!(
        "{},{},{},{},{},{},{:.12},{:.12e}",
        cert.provenance.construction,
        cert.provenance.code,
        cert.provenance.n,
        cert.t,
        cert.m,
        cert.epsilon_prime,
        cert.bound_bits,
        cert.alpha_effective
    )
}

pub fn certificate_markdown(cert: &GemCertificate) -> String {
    let mut s = String::new();
    s.push_str("| code | n | t | m | bound (bits) | alpha_effective |\n");
    s.push_str("|---|---|---|---|---|---|\n");
    s.push_str(&format!(
        "| {} | {} | {} | {} | {:.6} | {:.4e} |\n",
        cert.provenance.code,
        cert.provenance.n,
        cert.t,
        cert.m,
        cert.bound_bits,
        cert.alpha_effective
    ));
    for note in &cert.provenance.notes {
        s.push_str(&format!("\n- {note}"));
    }
    s.push('\n');
    s
}

/// Render a flat key/value record as CSV (header line plus one row).
pub fn record_csv(fields: &[(&str, String)]) -> String {
    let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
    let row: Vec<String> = fields.iter().map(|(_, v)| csv_escape(v)).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

/// Render a flat key/value record as a two-column Markdown table.
pub fn record_markdown(fields: &[(&str, String)]) -> String {
    let mut s = String::from("| field | value |\n|---|---|\n");
    for (k, v) in fields {
        s.push_str(&format!("| {k} | {} |\n", v.replace('|', "\\|")));
    }
    s
}

fn csv_escape(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}
