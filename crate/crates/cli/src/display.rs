use qec_energy::linalg::{kron, Matrix, Pauli};

/// Four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = 3 - x.abs().log10().floor() as i32;
    if (0..=6).contains(&decimals) {
        format!("{x:.prec$}", prec = decimals as usize)
    } else {
        format!("{x:.3e}")
    }
}

pub fn complex(re: f64, im: f64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    let (re, im) = (clean(re), clean(im));
    match (re == 0.0, im == 0.0) {
        (_, true) => sig4(re),
        (true, false) => format!("{}i", sig4(im)),
        _ => format!("{}{}{}i", sig4(re), if im < 0.0 { "-" } else { "+" }, sig4(im.abs())),
    }
}

pub fn matrix_rows(m: &Matrix) -> Vec<String> {
    let d = m.dim();
    let cells: Vec<Vec<String>> = (0..d)
        .map(|r| (0..d).map(|c| complex(m.get(r, c).re, m.get(r, c).im)).collect())
        .collect();
    let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
    cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| format!("{s:>width$}"))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect()
}

/// Expands a one- or two-qubit Hermitian matrix in the Pauli basis, e.g.
/// `0.5 I - 0.5 Z`.
pub fn pauli_expansion(m: &Matrix) -> String {
    const P: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let d = m.dim();
    let mut terms = Vec::new();
    let labels_and_mats: Vec<(String, Matrix)> = if d == 2 {
        P.iter()
            .map(|p| (p.as_char().to_string(), Matrix::One(p.matrix())))
            .collect()
    } else {
        P.iter()
            .flat_map(|a| {
                P.iter().map(move |b| {
                    (
                        format!("{}{}", a.as_char(), b.as_char()),
                        Matrix::Two(kron(&a.matrix(), &b.matrix())),
                    )
                })
            })
            .collect()
    };
    for (label, p) in labels_and_mats {
        let mut tr = 0.0;
        for r in 0..d {
            for c in 0..d {
                tr += (p.get(r, c).conj() * m.get(r, c)).re;
            }
        }
        let coef = tr / d as f64;
        if coef.abs() > 1e-12 {
            terms.push((coef, label));
        }
    }
    let mut out = String::new();
    for (i, (coef, label)) in terms.iter().enumerate() {
        let mag = sig4(coef.abs());
        let mag = if mag == "1.000" {
            String::new()
        } else {
            format!("{mag} ")
        };
        match (i, *coef < 0.0) {
            (0, false) => out.push_str(&format!("{mag}{label}")),
            (0, true) => out.push_str(&format!("-{mag}{label}")),
            (_, false) => out.push_str(&format!(" + {mag}{label}")),
            (_, true) => out.push_str(&format!(" - {mag}{label}")),
        }
    }
    out
}

/// File-name-safe form of a code id.
pub fn file_stem(id: &str) -> String {
    let mut s: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    s.trim_matches('_').to_string()
}
