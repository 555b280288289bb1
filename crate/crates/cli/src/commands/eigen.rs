use anyhow::Result;
use minplus::tropical::{eigen_pair, MinPlusMatrix};

use crate::exit;

/// Text printed by `eigen` for a matrix in the dense text format.
pub fn report(text: &str) -> Result<String> {
    let a = MinPlusMatrix::parse_text(text)?;
    let pair = eigen_pair(&a)?;
    let c = &pair.cycle;
    let mut path: Vec<String> = c.nodes.iter().map(|v| v.to_string()).collect();
    path.push(c.nodes[0].to_string());
    let x: Vec<String> = pair.vector.iter().map(|v| v.to_string()).collect();
    Ok(format!(
        "lambda: {}\ncycle: {} (weight {}, length {})\neigenvector: {}\n",
        pair.lambda,
        path.join(" -> "),
        c.weight,
        c.length(),
        x.join(" ")
    ))
}

pub fn run(text: &str) -> Result<i32> {
    print!("{}", report(text)?);
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle() {
        let r = report("inf 3\n1 inf\n").unwrap();
        assert!(r.starts_with("lambda: 2\ncycle: 0 -> 1 -> 0 (weight 4, length 2)"), "{r}");
    }

    #[test]
    fn disconnected_is_structural() {
        let e = report("1 2\ninf 3\n").unwrap_err();
        assert_eq!(exit::code_of(&e), exit::STRUCTURE);
        let e = report("1 x\n").unwrap_err();
        assert_eq!(exit::code_of(&e), exit::PARSE);
    }
}
