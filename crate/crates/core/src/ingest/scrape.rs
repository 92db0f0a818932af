//! Main-text extraction from article pages.

use scraper::{ElementRef, Html, Node, Selector};

use super::IngestError;

/// Link text counts this many times against a block's score.
pub const LINK_PENALTY: usize = 3;

const BLOCKS: &str = "article, main, section, div, td, body, p, li, blockquote, pre";
const SKIP: [&str; 5] = ["script", "style", "noscript", "template", "head"];
const BREAKS: [&str; 16] = [
    "p", "div", "br", "li", "h1", "h2", "h3", "h4", "h5", "h6", "tr", "article", "section", "blockquote", "pre", "ul",
];

/// Visible text of an element, with block boundaries as spaces.
fn collect_text(el: ElementRef, out: &mut String, links: &mut usize, in_link: bool) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => {
                out.push_str(t);
                if in_link {
                    *links += t.trim().chars().count();
                }
            }
            Node::Element(e) => {
                let name = e.name();
                if SKIP.contains(&name) {
                    continue;
                }
                let Some(child_el) = ElementRef::wrap(child) else { continue };
                let brk = BREAKS.contains(&name);
                if brk {
                    out.push(' ');
                }
                collect_text(child_el, out, links, in_link || name == "a");
                if brk {
                    out.push(' ');
                }
            }
            _ => {}
        }
    }
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Text of one block plus the length of its link text.
pub fn block_text(el: ElementRef) -> (String, usize) {
    let mut raw = String::new();
    let mut links = 0;
    collect_text(el, &mut raw, &mut links, false);
    (squash(&raw), links)
}

/// Pick the block element with the highest `text − 3·link_text` and return its text.
pub fn scrape_html(html: &str) -> Result<String, IngestError> {
    let doc = Html::parse_document(html);
    let sel = Selector::parse(BLOCKS).expect("static selector");
    let mut best: Option<(i64, String)> = None;
    for el in doc.select(&sel) {
        let (text, link_len) = block_text(el);
        let score = text.chars().count() as i64 - (LINK_PENALTY * link_len) as i64;
        // strictly greater: on ties the outer (earlier) block stays
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, text));
        }
    }
    match best {
        Some((score, text)) if score > 0 && !text.is_empty() => Ok(text),
        _ => Err(IngestError::EmptyDocument),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_page() {
        assert_eq!(
            scrape_html("<html><body><p>Hello world.</p></body></html>").unwrap(),
            "Hello world."
        );
    }

    #[test]
    fn entities_decoded() {
        assert_eq!(scrape_html("<p>a&amp;b</p>").unwrap(), "a&b");
    }

    #[test]
    fn scripts_and_styles_dropped() {
        let t = scrape_html("<body><style>p{x:1}</style><p>Text <script>var a = 1 < 2;</script>here</p></body>").unwrap();
        assert_eq!(t, "Text here");
    }

    #[test]
    fn empty_page() {
        assert!(matches!(scrape_html("<html><body></body></html>"), Err(IngestError::EmptyDocument)));
        assert!(matches!(scrape_html(""), Err(IngestError::EmptyDocument)));
    }

    #[test]
    fn lenient_parse() {
        assert_eq!(scrape_html("<p>unclosed <b>bold").unwrap(), "unclosed bold");
    }

    #[test]
    fn navigation_loses_to_body_text() {
        let nav = "<div id=nav><a href=/a>Home page</a> <a href=/b>World news</a></div>";
        let page = format!("<body>{nav}<div id=story><p>Long story text goes here for readers.</p></div></body>");
        assert_eq!(scrape_html(&page).unwrap(), "Long story text goes here for readers.");
    }
}
