//! Plain-text reports: an aligned table, free-form notes and a `key=value`
//! trailer ending in `result=PASS` or `result=FAIL`.

use std::fmt::Write;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub trailer: Vec<(String, String)>,
    pub pass: bool,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            pass: true,
            ..Default::default()
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(cells.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn kv(&mut self, k: &str, v: impl ToString) {
        self.trailer.push((k.to_string(), v.to_string()));
    }

    /// Record a property; the report fails if any check does.
    pub fn check(&mut self, ok: bool) -> bool {
        self.pass &= ok;
        ok
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn render(&self, machine: bool) -> String {
        let mut s = String::new();
        if !machine {
            writeln!(s, "# {}", self.title).unwrap();
            if !self.columns.is_empty() {
                let ncol = self.rows.iter().map(|r| r.len()).chain([self.columns.len()]).max().unwrap_or(0);
                let mut width = vec![0; ncol];
                for r in std::iter::once(&self.columns).chain(&self.rows) {
                    for (i, c) in r.iter().enumerate() {
                        width[i] = width[i].max(c.chars().count());
                    }
                }
                for r in std::iter::once(&self.columns).chain(&self.rows) {
                    let mut line = String::new();
                    for (i, c) in r.iter().enumerate() {
                        if i > 0 {
                            line.push_str("  ");
                        }
                        write!(line, "{c:<w$}", w = width[i]).unwrap();
                    }
                    writeln!(s, "{}", line.trim_end()).unwrap();
                }
            }
            for n in &self.notes {
                writeln!(s, "note: {n}").unwrap();
            }
            s.push('\n');
        }
        for (k, v) in &self.trailer {
            writeln!(s, "{k}={v}").unwrap();
        }
        writeln!(s, "result={}", self.verdict()).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_align() {
        let mut r = Report::new("t", &["a", "long"]);
        r.row(["xyz", "1"]);
        r.kv("k", 3);
        let s = r.render(false);
        assert!(s.contains("a    long\nxyz  1\n"));
        assert!(s.ends_with("k=3\nresult=PASS\n"));
        assert_eq!(r.render(true), "k=3\nresult=PASS\n");
    }
}
