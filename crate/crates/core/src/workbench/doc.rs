//! A tiny document model rendered as aligned text, markdown or CSV.

use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Txt,
    Md,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "txt" | "text" => Ok(Format::Txt),
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            other => Err(format!(
                "unknown format `{other}` (expected csv, md or txt)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Heading(String),
    Text(String),
    Fields(Vec<(String, String)>),
    Table {
        headers: Vec<String>,
        rows: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    blocks: Vec<Block>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn heading(&mut self, title: impl Into<String>) -> &mut Self {
        self.blocks.push(Block::Heading(title.into()));
        self
    }

    pub fn text(&mut self, text: impl Into<String>) -> &mut Self {
        self.blocks.push(Block::Text(text.into()));
        self
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let pair = (key.into(), value.to_string());
        match self.blocks.last_mut() {
            Some(Block::Fields(fields)) => fields.push(pair),
            _ => self.blocks.push(Block::Fields(vec![pair])),
        }
        self
    }

    pub fn table<H: Into<String>>(
        &mut self,
        headers: impl IntoIterator<Item = H>,
        rows: Vec<Vec<String>>,
    ) -> &mut Self {
        self.blocks.push(Block::Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows,
        });
        self
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn append(&mut self, other: Document) -> &mut Self {
        self.blocks.extend(other.blocks);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Txt => self.render_txt(),
            Format::Md => self.render_md(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_txt(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            match block {
                Block::Heading(h) => {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "{h}");
                    let _ = writeln!(out, "{}", "-".repeat(h.chars().count()));
                }
                Block::Text(t) => {
                    let _ = writeln!(out, "{t}");
                }
                Block::Fields(fields) => {
                    let width = fields
                        .iter()
                        .map(|(k, _)| k.chars().count())
                        .max()
                        .unwrap_or(0);
                    for (k, v) in fields {
                        let _ = writeln!(out, "{k:<width$}  {v}");
                    }
                }
                Block::Table { headers, rows } => {
                    let mut widths: Vec<usize> =
                        headers.iter().map(|h| h.chars().count()).collect();
                    for row in rows {
                        for (i, cell) in row.iter().enumerate() {
                            widths[i] = widths[i].max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| {
                        cells
                            .iter()
                            .zip(&widths)
                            .map(|(c, &w)| format!("{c:<w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                            .trim_end()
                            .to_string()
                    };
                    let _ = writeln!(out, "{}", line(headers));
                    for row in rows {
                        let _ = writeln!(out, "{}", line(row));
                    }
                }
            }
        }
        out
    }

    fn render_md(&self) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut parts = Vec::new();
        for block in &self.blocks {
            parts.push(match block {
                Block::Heading(h) => format!("## {h}\n"),
                Block::Text(t) => format!("{t}\n"),
                Block::Fields(fields) => fields
                    .iter()
                    .map(|(k, v)| format!("- **{}**: {}\n", k, escape(v)))
                    .collect(),
                Block::Table { headers, rows } => {
                    let mut t = format!("| {} |\n", headers.join(" | "));
                    let _ = writeln!(t, "|{}", "---|".repeat(headers.len()));
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
                        let _ = writeln!(t, "| {} |", cells.join(" | "));
                    }
                    t
                }
            });
        }
        parts.join("\n")
    }

    /// Fields become `key,value` records; tables keep their headers.
    /// Consecutive sections are separated by a blank line.
    fn render_csv(&self) -> String {
        let mut sections = Vec::new();
        for block in &self.blocks {
            let mut writer = csv::WriterBuilder::new()
                .flexible(true)
                .from_writer(Vec::new());
            match block {
                Block::Heading(_) | Block::Text(_) => continue,
                Block::Fields(fields) => {
                    for (k, v) in fields {
                        writer.write_record([k, v]).expect("in-memory write");
                    }
                }
                Block::Table { headers, rows } => {
                    writer.write_record(headers).expect("in-memory write");
                    for row in rows {
                        writer.write_record(row).expect("in-memory write");
                    }
                }
            }
            let bytes = writer.into_inner().expect("in-memory flush");
            sections.push(String::from_utf8(bytes).expect("utf-8 input"));
        }
        sections.join("\n")
    }
}
