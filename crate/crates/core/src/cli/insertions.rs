//! Insertion lists like `"tau(0,1)^4 * tau(1,0) mu1"`.

/// Parsed insertions and whether a `mu1` token was present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertions {
    pub taus: Vec<(u32, u32)>,
    pub mu1: bool,
}

pub fn parse_insertions(s: &str) -> Result<Insertions, String> {
    let mut out = Insertions {
        taus: Vec::new(),
        mu1: false,
    };
    for token in s
        .split(|c: char| c.is_whitespace() || c == '*')
        .filter(|t| !t.is_empty())
    {
        if token == "mu1" {
            if out.mu1 {
                return Err("at most one mu1 insertion".into());
            }
            out.mu1 = true;
            continue;
        }
        let bad = || format!("bad insertion {token:?}; expected tau(a,m) or tau(a,m)^k");
        let body = token.strip_prefix("tau(").ok_or_else(bad)?;
        let (inner, rest) = body.split_once(')').ok_or_else(bad)?;
        let (a, m) = inner.split_once(',').ok_or_else(bad)?;
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        let power: usize = match rest {
            "" => 1,
            p => p.strip_prefix('^').and_then(|k| k.parse().ok()).ok_or_else(bad)?,
        };
        out.taus.extend(std::iter::repeat_n((a, m), power));
    }
    if out.taus.is_empty() {
        return Err("no insertions given".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let p = parse_insertions("tau(0,1)^4").unwrap();
        assert_eq!(p.taus, vec![(0, 1); 4]);
        let p = parse_insertions("tau(0,2)*tau(0,1)^2 mu1").unwrap();
        assert_eq!(p.taus, vec![(0, 2), (0, 1), (0, 1)]);
        assert!(p.mu1);
        assert!(parse_insertions("tau(0,1").is_err());
        assert!(parse_insertions("tau(0,1)^x").is_err());
        assert!(parse_insertions("").is_err());
        assert!(parse_insertions("mu1 mu1 tau(0,0)").is_err());
    }
}
