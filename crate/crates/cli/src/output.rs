use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gammatime::{Error, Extended, Result};

use crate::config::SeedSource;

/// Plain decimal with 15 significant digits, trailing zeros dropped.
pub fn fmt15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (14 - mag).clamp(0, 340) as usize;
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
}

pub fn fmt_extended(x: Extended) -> String {
    match x {
        Extended::Finite(v) => fmt15(v),
        Extended::Infinite => "inf".into(),
    }
}

/// `# gammatime <sub> --flag value ... seed=S (source)` comment line.
pub struct Header {
    text: String,
}

impl Header {
    pub fn new(sub: &str) -> Self {
        Self {
            text: format!("# gammatime {sub}"),
        }
    }

    pub fn push(&mut self, flag: &str, value: impl Display) -> &mut Self {
        self.text.push_str(&format!(" --{flag} {value}"));
        self
    }

    pub fn seed(&mut self, seed: u64, source: SeedSource) -> &mut Self {
        self.text.push_str(&format!(" --seed {seed} ({})", source.name()));
        self
    }
}

/// A file (with header) or stdout (without).
pub struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>, header: &Header) -> Result<Self> {
        match path {
            Some(p) => {
                let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                let mut out: Box<dyn Write> = Box::new(BufWriter::new(f));
                writeln!(out, "{}", header.text)?;
                Ok(Self { out })
            }
            None => Ok(Self {
                out: Box::new(BufWriter::new(io::stdout().lock())),
            }),
        }
    }

    pub fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}")?;
        Ok(())
    }

    pub fn raw(&mut self, bytes: &[u8]) -> Result<()> {
        self.out.write_all(bytes)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
