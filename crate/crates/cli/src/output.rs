use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// JSON text for one report object, with a trailing newline.
pub fn report_json<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(&Envelope { command, config, result })?;
    text.push('\n');
    Ok(text)
}

/// Report files land in one directory, created on first write.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn new(dir: PathBuf) -> Self {
        OutDir { dir }
    }

    fn create(&self, name: &str) -> anyhow::Result<fs::File> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.dir.join(name);
        fs::File::create(&path).with_context(|| format!("creating {}", path.display()))
    }

    pub fn json<C: Serialize, R: Serialize>(&self, name: &str, command: &str, config: &C, result: &R) -> anyhow::Result<()> {
        let text = report_json(command, config, result)?;
        self.create(name)?.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Hands a buffered writer to `fill` and flushes it.
    pub fn with_file(
        &self,
        name: &str,
        fill: impl FnOnce(&mut std::io::BufWriter<fs::File>) -> anyhow::Result<()>,
    ) -> anyhow::Result<()> {
        let mut w = std::io::BufWriter::new(self.create(name)?);
        fill(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
