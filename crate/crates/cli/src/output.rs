//! Output sinks: stdout or a file, with the optional `LHARM_OUT` directory
//! override for relative paths.

use std::io::Write;
use std::path::PathBuf;

pub struct Sink {
    target: Option<PathBuf>,
    buffer: String,
}

impl Sink {
    pub fn new(output: Option<&str>) -> Self {
        let target = output.map(|p| {
            let path = PathBuf::from(p);
            match std::env::var_os("LHARM_OUT") {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path,
            }
        });
        Sink { target, buffer: String::new() }
    }

    pub fn line(&mut self, s: &str) {
        self.buffer.push_str(s);
        self.buffer.push('\n');
    }

    pub fn finish(self) -> std::io::Result<()> {
        match self.target {
            Some(path) => std::fs::write(path, self.buffer.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.buffer.as_bytes())
            }
        }
    }
}
