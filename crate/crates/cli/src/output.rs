use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::exit::Failure;

/// Optional `# generated ...` header for CSV output.
pub struct Stamp(Option<String>);

impl Stamp {
    pub fn new(enabled: bool) -> Self {
        Stamp(enabled.then(|| {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            format!("unix={secs} twistlab {}", env!("CARGO_PKG_VERSION"))
        }))
    }

    pub fn get(&self) -> Option<&str> {
        self.0.as_deref()
    }

    pub fn write_header(&self, out: &mut dyn Write) -> io::Result<()> {
        if let Some(ts) = &self.0 {
            writeln!(out, "# generated {ts}")?;
        }
        Ok(())
    }
}

/// File at `path`, or stdout.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn summary(line: impl AsRef<str>) {
    eprintln!("{}", line.as_ref());
}
