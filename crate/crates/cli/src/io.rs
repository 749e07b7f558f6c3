//! File IO helpers: coefficient auto-detection, CSV emission with
//! provenance headers, float formatting.

use std::fmt::Write as _;
use std::path::Path;

use rieszlab::approx::ApproxInput;
use rieszlab::{Error, FourierCoeffs, Result, RieszCoeffs};

/// 17 significant digits: lossless for f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Load a coefficient file, detecting the container by its constant-term
/// key (`alpha0` for sawtooth coefficients, `a0` for cosine/sine ones).
pub fn load_coeffs(path: &Path) -> Result<ApproxInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::validation("coefficient file must be a JSON object"))?;
    if obj.contains_key("alpha0") {
        let c: RieszCoeffs =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(ApproxInput::Riesz(c))
    } else if obj.contains_key("a0") {
        let c: FourierCoeffs =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(ApproxInput::Fourier(c))
    } else {
        Err(Error::validation(
            "coefficient file carries neither \"alpha0\" nor \"a0\"",
        ))
    }
}

pub fn load_riesz(path: &Path) -> Result<RieszCoeffs> {
    match load_coeffs(path)? {
        ApproxInput::Riesz(c) => Ok(c),
        ApproxInput::Fourier(_) => Err(Error::usage(format!(
            "{} holds cosine/sine coefficients; expected sawtooth coefficients (alpha0)",
            path.display()
        ))),
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))
}

/// A CSV document with `#`-prefixed provenance lines before the header.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(provenance: &[(&str, String)], header: &str) -> Csv {
        let mut buf = String::new();
        writeln!(buf, "# tool=rieszlab {}", env!("CARGO_PKG_VERSION")).unwrap();
        for (key, value) in provenance {
            writeln!(buf, "# {key}={value}").unwrap();
        }
        writeln!(buf, "{header}").unwrap();
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        writeln!(self.buf, "{}", fields.join(",")).unwrap();
    }

    pub fn finish(self) -> String {
        self.buf
    }

    pub fn write(self, path: &Path) -> Result<()> {
        std::fs::write(path, self.buf)
            .map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

/// Parse "a,b,c" into numbers.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| Error::usage(format!("cannot parse {what} entry {part:?}")))
        })
        .collect()
}
