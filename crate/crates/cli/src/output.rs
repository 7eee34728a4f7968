//! CSV with a leading `# config:` comment echoing every input.

use serde::Serialize;

use crate::CliError;

/// Renders rows as CSV after one `# config: {json}` line.
pub fn to_csv<C: Serialize, R: Serialize>(config: &C, rows: &[R]) -> Result<String, CliError> {
    let mut out = format!("# config: {}\n", serde_json::to_string(config).expect("config serializes"));
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    out.push_str(std::str::from_utf8(&bytes).expect("csv is utf-8"));
    Ok(out)
}

/// Drops the last column (`wall_ms`) of every data line; used to compare
/// reruns.
pub fn strip_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            if l.starts_with('#') {
                l
            } else {
                l.rsplit_once(',').map_or(l, |(head, _)| head)
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// `{2,5,11}` with 1-based coordinates.
pub fn set_string(s: &junta_core::boolcube::BitMask) -> String {
    let inner: Vec<String> = s.iter_ones().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Parses `2,5,11` (1-based) into a mask over `n` coordinates.
pub fn parse_set(n: usize, text: &str) -> Result<junta_core::boolcube::BitMask, CliError> {
    let mut out = junta_core::boolcube::BitMask::zeros(n);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let c: usize = part
            .trim_matches(|c| c == '{' || c == '}')
            .parse()
            .map_err(|_| CliError::Usage(format!("bad coordinate {part:?}")))?;
        if c == 0 || c > n {
            return Err(CliError::Usage(format!("coordinate {c} outside 1..={n}")));
        }
        out.set(c - 1, true);
    }
    Ok(out)
}

pub fn millis(d: std::time::Duration) -> u64 {
    d.as_millis() as u64
}
