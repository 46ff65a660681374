use super::Structure;
use crate::{Error, Result};

/// Parses a group spec such as `semidirect:2,4,3` or `product:cyclic:2*cyclic:4`.
///
/// `product:` splits at the first `*`, so nested products associate to the right.
pub fn parse_spec(input: &str) -> Result<Structure> {
    parse_at(input, 0)
}

fn parse_at(input: &str, offset: usize) -> Result<Structure> {
    let colon = input
        .find(':')
        .ok_or_else(|| Error::parse(offset, format!("expected `kind:params`, got {input:?}")))?;
    let (kind, rest) = (&input[..colon], &input[colon + 1..]);
    let body = offset + colon + 1;
    match kind {
        "product" => {
            let star = rest
                .find('*')
                .ok_or_else(|| Error::parse(body, "product needs two factors separated by `*`"))?;
            let left = parse_at(&rest[..star], body)?;
            let right = parse_at(&rest[star + 1..], body + star + 1)?;
            Ok(Structure::Product(Box::new(left), Box::new(right)))
        }
        "semidirect" => {
            let nums = numbers(rest, body)?;
            match nums[..] {
                [m, n, s] => Ok(Structure::Semidirect { m, n, s }),
                _ => Err(Error::parse(
                    body,
                    "semidirect takes exactly three parameters m,n,s",
                )),
            }
        }
        "cyclic" | "dihedral" | "dicyclic" | "quaternion" | "semidihedral" => {
            let nums = numbers(rest, body)?;
            let [v] = nums[..] else {
                return Err(Error::parse(
                    body,
                    format!("{kind} takes exactly one parameter"),
                ));
            };
            Ok(match kind {
                "cyclic" => Structure::Cyclic { n: v },
                "dihedral" => Structure::Dihedral { k: v },
                "dicyclic" => Structure::Dicyclic { k: v },
                "quaternion" => Structure::Quaternion { k: v },
                _ => Structure::Semidihedral { k: v },
            })
        }
        _ => Err(Error::parse(offset, format!("unknown group kind {kind:?}"))),
    }
}

fn numbers(s: &str, offset: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for part in s.split(',') {
        let v = part.parse::<usize>().map_err(|_| {
            Error::parse(
                pos,
                format!("expected a non-negative integer, got {part:?}"),
            )
        })?;
        out.push(v);
        pos += part.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        for spec in [
            "cyclic:6",
            "semidirect:2,4,3",
            "dihedral:4",
            "dicyclic:3",
            "quaternion:2",
            "semidihedral:3",
            "product:cyclic:2*cyclic:4",
            "product:cyclic:2*product:cyclic:3*cyclic:3",
        ] {
            let s = parse_spec(spec).unwrap();
            assert_eq!(s.to_string(), spec);
        }
    }

    #[test]
    fn error_positions() {
        match parse_spec("semidirect:2,x,3") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 13),
            other => panic!("{other:?}"),
        }
        match parse_spec("product:cyclic:2*torus:3") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 17),
            other => panic!("{other:?}"),
        }
        assert!(parse_spec("cyclic").is_err());
        assert!(parse_spec("cyclic:2,3").is_err());
        assert!(parse_spec("semidirect:2,4").is_err());
        assert!(parse_spec("product:cyclic:2").is_err());
        assert!(parse_spec("Cyclic:2").is_err());
        assert!(parse_spec("cyclic: 2").is_err());
    }
}
