//! Command results and how they reach the disk.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// One output file; `extension` replaces the primary path's extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub extension: Option<&'static str>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub primary: Artifact,
    pub extras: Vec<Artifact>,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
}

impl Artifacts {
    pub fn new(primary: String) -> Self {
        Self {
            primary: Artifact {
                extension: None,
                contents: primary,
            },
            extras: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn with_extra(mut self, extension: &'static str, contents: String) -> Self {
        self.extras.push(Artifact {
            extension: Some(extension),
            contents,
        });
        self
    }

    pub fn extra(&self, extension: &str) -> Option<&str> {
        self.extras
            .iter()
            .find(|a| a.extension == Some(extension))
            .map(|a| a.contents.as_str())
    }

    /// Destination of every artifact for a primary output path.
    pub fn paths(&self, out: &Path) -> Vec<(PathBuf, &str)> {
        let mut v = vec![(out.to_path_buf(), self.primary.contents.as_str())];
        for a in &self.extras {
            let ext = a.extension.expect("extras carry an extension");
            v.push((out.with_extension(ext), a.contents.as_str()));
        }
        v
    }

    /// Writes all files through temporaries, renaming only once every
    /// temporary is complete.
    pub fn write_all(&self, out: &Path) -> Result<Vec<PathBuf>> {
        let targets = self.paths(out);
        let mut staged = Vec::with_capacity(targets.len());
        for (path, contents) in &targets {
            match write_temp(path, contents) {
                Ok(tmp) => staged.push((tmp, path.clone())),
                Err(e) => {
                    for (tmp, _) in &staged {
                        let _ = fs::remove_file(tmp);
                    }
                    return Err(e);
                }
            }
        }
        let mut done = Vec::new();
        for (tmp, path) in staged {
            fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
            done.push(path);
        }
        Ok(done)
    }
}

fn write_temp(path: &Path, contents: &str) -> Result<PathBuf> {
    let name = path
        .file_name()
        .with_context(|| format!("{} is not a file path", path.display()))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(contents.as_bytes())
        .and_then(|_| f.sync_all())
        .with_context(|| format!("writing {}", tmp.display()))?;
    Ok(tmp)
}

/// Plot frame shared by the SVG writers.
pub struct Svg {
    body: String,
    w: f64,
    h: f64,
    pad: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Svg {
    pub fn new(x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) -> Self {
        let (w, h, pad) = (800.0, 600.0, 50.0);
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        );
        let _ = writeln!(body, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let _ = writeln!(
            body,
            "<rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            w - 2.0 * pad,
            h - 2.0 * pad
        );
        let _ = writeln!(body, "<text x=\"{}\" y=\"{}\" font-size=\"14\">{xlabel}</text>", w / 2.0, h - 15.0);
        let _ = writeln!(body, "<text x=\"5\" y=\"{}\" font-size=\"14\">{ylabel}</text>", h / 2.0);
        for (v, anchor) in [(x.0, pad), (x.1, w - pad)] {
            let _ = writeln!(body, "<text x=\"{anchor}\" y=\"{}\" font-size=\"11\">{v:.3}</text>", h - pad + 15.0);
        }
        for (v, anchor) in [(y.0, h - pad), (y.1, pad)] {
            let _ = writeln!(body, "<text x=\"5\" y=\"{anchor}\" font-size=\"11\">{v:.3}</text>");
        }
        Self { body, w, h, pad, x, y }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = self.pad + (x - self.x.0) / (self.x.1 - self.x.0) * (self.w - 2.0 * self.pad);
        let py = self.h - self.pad - (y - self.y.0) / (self.y.1 - self.y.0) * (self.h - 2.0 * self.pad);
        (px, py)
    }

    pub fn points(&mut self, pts: impl IntoIterator<Item = (f64, f64)>, r: f64) {
        self.body.push_str("<g fill=\"black\">\n");
        for (x, y) in pts {
            let (px, py) = self.map(x, y);
            let _ = writeln!(self.body, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r}\"/>");
        }
        self.body.push_str("</g>\n");
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>",
            coords.join(" ")
        );
    }

    /// Grey cell with darkness `v` ∈ [0, 1] centred on (x, y).
    pub fn cell(&mut self, x: f64, y: f64, dx: f64, dy: f64, v: f64) {
        let (x0, y0) = self.map(x - dx / 2.0, y + dy / 2.0);
        let (x1, y1) = self.map(x + dx / 2.0, y - dy / 2.0);
        let g = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
        let _ = writeln!(
            self.body,
            "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({g},{g},{g})\"/>",
            x1 - x0,
            y1 - y0
        );
    }

    pub fn vline(&mut self, x: f64) {
        let (px, top) = self.map(x, self.y.1);
        let (_, bottom) = self.map(x, self.y.0);
        let _ = writeln!(
            self.body,
            "<line x1=\"{px:.2}\" y1=\"{top:.2}\" x2=\"{px:.2}\" y2=\"{bottom:.2}\" stroke=\"red\" stroke-dasharray=\"6,4\"/>"
        );
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}
