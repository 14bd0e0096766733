//! CSV assembly: a `#`-comment metadata block (scenario, config hash, seed,
//! build tag), one documented header row, then the data.

/// FNV-1a, 64-bit. Stable across platforms; used to fingerprint the
/// effective config in every CSV header.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

pub fn render_csv(
    scenario: &str,
    config_hash: u64,
    seed: u64,
    columns: &[&str],
    rows: &[Vec<String>],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# scenario: {scenario}\n"));
    out.push_str(&format!("# config_hash: {config_hash:016x}\n"));
    out.push_str(&format!("# seed: {seed}\n"));
    out.push_str(&format!(
        "# build: covert-sim {} (git describe unavailable)\n",
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len(), "row arity mismatch");
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
