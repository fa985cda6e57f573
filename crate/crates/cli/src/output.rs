use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ncmatrix::C64;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

/// Compact JSON with every float at 17 significant digits.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    emit(path, &to_json(value)?)
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Split real and imaginary parts.
#[derive(Debug, Serialize)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&[C64]> for ComplexVec {
    fn from(v: &[C64]) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}
