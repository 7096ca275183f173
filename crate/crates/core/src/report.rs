//! Deterministic JSON emission for reports: keys in insertion order, floats
//! printed with 17 significant digits so identical runs produce identical
//! bytes regardless of worker count.

/// Minimal ordered JSON writer.
#[derive(Clone, Debug, Default)]
pub struct JsonObj {
    fields: Vec<(String, String)>,
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl JsonObj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn raw(mut self, key: &str, raw: String) -> Self {
        self.fields.push((key.to_string(), raw));
        self
    }

    pub fn f64(self, key: &str, v: f64) -> Self {
        self.raw(key, fmt_f64(v))
    }

    pub fn usize(self, key: &str, v: usize) -> Self {
        self.raw(key, v.to_string())
    }

    pub fn i32(self, key: &str, v: i32) -> Self {
        self.raw(key, v.to_string())
    }

    pub fn bool(self, key: &str, v: bool) -> Self {
        self.raw(key, v.to_string())
    }

    pub fn str(self, key: &str, v: &str) -> Self {
        let quoted = format!("\"{}\"", escape(v));
        self.raw(key, quoted)
    }

    pub fn f64_array(self, key: &str, vs: &[f64]) -> Self {
        let body: Vec<String> = vs.iter().map(|&v| fmt_f64(v)).collect();
        self.raw(key, format!("[{}]", body.join(",")))
    }

    pub fn usize_array(self, key: &str, vs: &[usize]) -> Self {
        let body: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        self.raw(key, format!("[{}]", body.join(",")))
    }

    pub fn obj(self, key: &str, o: JsonObj) -> Self {
        let body = o.to_string();
        self.raw(key, body)
    }

    pub fn obj_array(self, key: &str, os: Vec<JsonObj>) -> Self {
        let body: Vec<String> = os.into_iter().map(|o| o.to_string()).collect();
        self.raw(key, format!("[{}]", body.join(",")))
    }
}

impl std::fmt::Display for JsonObj {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, (key, val)) in self.fields.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "\"{}\":{}", escape(key), val)?;
        }
        write!(f, "}}")
    }
}
