//! `alpha,phi` settings files for `hv verdict`.

use delayed_choice::hv::Setting;

/// Parses one `alpha,phi` pair per line. `#` starts a comment; blank lines
/// are skipped. Angles are converted from degrees when `degrees` is set.
pub fn parse_settings(text: &str, degrees: bool) -> Result<Vec<Setting>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [a, p] = fields[..] else {
            return Err(format!("line {}: expected `alpha,phi`, got `{line}`", i + 1));
        };
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: `{s}`: {e}", i + 1));
        let (mut alpha, mut phi) = (parse(a)?, parse(p)?);
        if degrees {
            alpha = alpha.to_radians();
            phi = phi.to_radians();
        }
        out.push(Setting::new(alpha, phi).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(out)
}
