//! Graphviz rendering of a base window.

use doctrines::fincat::CatWindow;
use std::fmt::Write as _;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One node per object, one edge per non-identity arrow.
pub fn to_dot(name: &str, c: &CatWindow) -> String {
    let mut s = format!("digraph \"{}\" {{\n", esc(name));
    for o in c.objects() {
        let _ = writeln!(s, "  n{o} [label=\"{}\"];", esc(c.object_name(o)));
    }
    for f in c.arrows() {
        if c.is_identity(f) {
            continue;
        }
        let _ = writeln!(
            s,
            "  n{} -> n{} [label=\"{}\"];",
            c.dom(f),
            c.cod(f),
            esc(c.arrow_name(f))
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use doctrines::fixtures::blur;

    #[test]
    fn counts() {
        let p = blur();
        let d = to_dot(&p.name, p.base());
        assert_eq!(d.matches("[label=").count(), 2 + 16);
        assert_eq!(d.matches(" -> ").count(), 16);
    }
}
