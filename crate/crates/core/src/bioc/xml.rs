use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::model::*;
use super::validate::validate;
use crate::error::{Error, Result};

/// Parse a BioC XML collection.
///
/// Whitespace between elements is ignored; text inside leaf elements is
/// kept byte-for-byte. Elements outside the BioC vocabulary are rejected.
pub fn parse_bioc_xml(input: &[u8]) -> Result<BiocCollection> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let (line, column) = line_col_of_byte(input, e.valid_up_to());
        Error::Xml {
            line,
            column,
            message: format!("invalid UTF-8: {e}"),
        }
    })?;
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| {
        let pos = e.pos();
        Error::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "collection" {
        return Err(schema(&root, "root element must be <collection>"));
    }
    read_collection(root)
}

fn line_col_of_byte(input: &[u8], pos: usize) -> (u32, u32) {
    let before = &input[..pos.min(input.len())];
    let line = before.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
    let col = before.iter().rev().take_while(|&&b| b != b'\n').count() as u32 + 1;
    (line, col)
}

fn schema(node: &Node, message: impl Into<String>) -> Error {
    let pos = node.document().text_pos_at(node.range().start);
    Error::Schema {
        line: pos.row,
        column: pos.col,
        message: message.into(),
    }
}

/// Child elements, rejecting stray non-whitespace text.
fn elements<'a, 'i>(node: Node<'a, 'i>) -> Result<Vec<Node<'a, 'i>>> {
    let mut out = Vec::new();
    for child in node.children() {
        if child.is_element() {
            out.push(child);
        } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
            return Err(schema(
                &child,
                format!("unexpected text inside <{}>", node.tag_name().name()),
            ));
        }
    }
    Ok(out)
}

fn leaf_text(node: &Node) -> Result<String> {
    let mut s = String::new();
    for child in node.children() {
        if child.is_element() {
            return Err(schema(
                &child,
                format!("<{}> may only contain text", node.tag_name().name()),
            ));
        }
        if child.is_text() {
            s.push_str(child.text().unwrap_or(""));
        }
    }
    Ok(s)
}

fn attr<'a>(node: &Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| schema(node, format!("<{}> lacks attribute {name}", node.tag_name().name())))
}

fn number(node: &Node, raw: &str, what: &str) -> Result<usize> {
    raw.trim()
        .parse()
        .map_err(|_| schema(node, format!("{what} is not a non-negative integer: {raw:?}")))
}

fn read_infon(node: &Node, infons: &mut Infons) -> Result<()> {
    let key = attr(node, "key")?;
    if infons.contains_key(key) {
        return Err(schema(node, format!("duplicate infon key {key:?}")));
    }
    infons.insert(key, leaf_text(node)?);
    Ok(())
}

fn unknown(node: &Node, parent: &str) -> Error {
    schema(
        node,
        format!("unexpected element <{}> in <{parent}>", node.tag_name().name()),
    )
}

fn read_collection(node: Node) -> Result<BiocCollection> {
    let mut c = BiocCollection::default();
    for child in elements(node)? {
        match child.tag_name().name() {
            "source" => c.source = leaf_text(&child)?,
            "date" => c.date = leaf_text(&child)?,
            "key" => c.key = leaf_text(&child)?,
            "infon" => read_infon(&child, &mut c.infons)?,
            "document" => c.documents.push(read_document(child)?),
            _ => return Err(unknown(&child, "collection")),
        }
    }
    Ok(c)
}

fn read_document(node: Node) -> Result<BiocDocument> {
    let mut d = BiocDocument::default();
    for child in elements(node)? {
        match child.tag_name().name() {
            "id" => d.id = leaf_text(&child)?,
            "infon" => read_infon(&child, &mut d.infons)?,
            "passage" => d.passages.push(read_passage(child)?),
            _ => return Err(unknown(&child, "document")),
        }
    }
    Ok(d)
}

fn read_passage(node: Node) -> Result<BiocPassage> {
    let mut p = BiocPassage::default();
    let mut offset = None;
    for child in elements(node)? {
        match child.tag_name().name() {
            "infon" => read_infon(&child, &mut p.infons)?,
            "offset" => offset = Some(number(&child, &leaf_text(&child)?, "offset")?),
            "text" => p.text = leaf_text(&child)?,
            "sentence" => p.sentences.push(read_sentence(child)?),
            "annotation" => p.annotations.push(read_annotation(child)?),
            "relation" => p.relations.push(read_relation(child)?),
            _ => return Err(unknown(&child, "passage")),
        }
    }
    p.offset = offset.ok_or_else(|| schema(&node, "<passage> lacks <offset>"))?;
    Ok(p)
}

fn read_sentence(node: Node) -> Result<BiocSentence> {
    let mut s = BiocSentence::default();
    let mut offset = None;
    for child in elements(node)? {
        match child.tag_name().name() {
            "infon" => read_infon(&child, &mut s.infons)?,
            "offset" => offset = Some(number(&child, &leaf_text(&child)?, "offset")?),
            "text" => s.text = leaf_text(&child)?,
            "annotation" => s.annotations.push(read_annotation(child)?),
            "relation" => s.relations.push(read_relation(child)?),
            _ => return Err(unknown(&child, "sentence")),
        }
    }
    s.offset = offset.ok_or_else(|| schema(&node, "<sentence> lacks <offset>"))?;
    Ok(s)
}

fn read_annotation(node: Node) -> Result<BiocAnnotation> {
    let mut a = BiocAnnotation {
        id: attr(&node, "id")?.to_string(),
        ..Default::default()
    };
    for child in elements(node)? {
        match child.tag_name().name() {
            "infon" => read_infon(&child, &mut a.infons)?,
            "location" => {
                let offset = number(&child, attr(&child, "offset")?, "location offset")?;
                let length = number(&child, attr(&child, "length")?, "location length")?;
                a.locations.push(Location::new(offset, length));
            }
            "text" => a.text = leaf_text(&child)?,
            _ => return Err(unknown(&child, "annotation")),
        }
    }
    Ok(a)
}

fn read_relation(node: Node) -> Result<BiocRelation> {
    let mut r = BiocRelation {
        id: attr(&node, "id")?.to_string(),
        ..Default::default()
    };
    for child in elements(node)? {
        match child.tag_name().name() {
            "infon" => read_infon(&child, &mut r.infons)?,
            "node" => r
                .nodes
                .push(BiocNode::new(attr(&child, "refid")?, attr(&child, "role")?)),
            _ => return Err(unknown(&child, "relation")),
        }
    }
    Ok(r)
}

/// Serialize a collection as BioC XML (UTF-8, 2-space indent, LF).
///
/// The collection must pass [`validate`]; otherwise every violation is
/// returned.
pub fn serialize_bioc_xml(c: &BiocCollection) -> Result<Vec<u8>> {
    let violations = validate(c);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let mut w = Writer::default();
    w.out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    w.out.push_str("<!DOCTYPE collection SYSTEM \"BioC.dtd\">\n");
    w.open("collection", &[]);
    w.leaf("source", &c.source);
    w.leaf("date", &c.date);
    w.leaf("key", &c.key);
    w.infons(&c.infons);
    for d in &c.documents {
        w.open("document", &[]);
        w.leaf("id", &d.id);
        w.infons(&d.infons);
        for p in &d.passages {
            w.open("passage", &[]);
            w.infons(&p.infons);
            w.leaf("offset", &p.offset.to_string());
            w.leaf("text", &p.text);
            for s in &p.sentences {
                w.open("sentence", &[]);
                w.infons(&s.infons);
                w.leaf("offset", &s.offset.to_string());
                w.leaf("text", &s.text);
                w.annotations(&s.annotations);
                w.relations(&s.relations);
                w.close("sentence");
            }
            w.annotations(&p.annotations);
            w.relations(&p.relations);
            w.close("passage");
        }
        w.close("document");
    }
    w.close("collection");
    Ok(w.out.into_bytes())
}

#[derive(Default)]
struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn start_tag(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {k}=\"{}\"", escape(v, true));
        }
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.start_tag(name, attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        let _ = writeln!(self.out, "</{name}>");
    }

    fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.start_tag(name, attrs);
        self.out.push_str("/>\n");
    }

    fn leaf_with(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) {
        self.start_tag(name, attrs);
        let _ = writeln!(self.out, ">{}</{name}>", escape(text, false));
    }

    fn leaf(&mut self, name: &str, text: &str) {
        self.leaf_with(name, &[], text);
    }

    fn infons(&mut self, infons: &Infons) {
        for (k, v) in infons.iter() {
            self.leaf_with("infon", &[("key", k)], v);
        }
    }

    fn annotations(&mut self, anns: &[BiocAnnotation]) {
        for a in anns {
            self.open("annotation", &[("id", &a.id)]);
            self.infons(&a.infons);
            for l in &a.locations {
                self.empty(
                    "location",
                    &[("offset", &l.offset.to_string()), ("length", &l.length.to_string())],
                );
            }
            self.leaf("text", &a.text);
            self.close("annotation");
        }
    }

    fn relations(&mut self, rels: &[BiocRelation]) {
        for r in rels {
            self.open("relation", &[("id", &r.id)]);
            self.infons(&r.infons);
            for n in &r.nodes {
                self.empty("node", &[("refid", &n.refid), ("role", &n.role)]);
            }
            self.close("relation");
        }
    }
}

fn escape(s: &str, attribute: bool) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            '"' if attribute => out.push_str("&quot;"),
            '\n' if attribute => out.push_str("&#10;"),
            '\t' if attribute => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NER_SNIPPET: &str = r#"<collection>
  <source>test</source>
  <date>2022-01-14</date>
  <key></key>
  <infon key="nlp_system">MetaMap</infon>
  <document>
    <id>1</id>
    <passage>
      <offset>0</offset>
      <text>There is no pneumonia or pneumothorax.</text>
      <annotation id="a1">
        <infon key="source_concept">Pneumonia</infon>
        <infon key="source_concept_id">RID5350</infon>
        <location offset="12" length="9"/>
        <text>pneumonia</text>
      </annotation>
      <annotation id="a2">
        <infon key="source_concept">Pneumothorax</infon>
        <infon key="source_concept_id">RID5352</infon>
        <location offset="25" length="12"/>
        <text>pneumothorax</text>
      </annotation>
    </passage>
  </document>
</collection>"#;

    #[test]
    fn parses_ner_snippet() {
        let c = parse_bioc_xml(NER_SNIPPET.as_bytes()).unwrap();
        let a = &c.documents[0].passages[0].annotations[0];
        assert_eq!(a.id, "a1");
        assert_eq!(a.infons.get("source_concept_id"), Some("RID5350"));
        assert_eq!(a.locations, vec![Location::new(12, 9)]);
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn empty_collection() {
        let c = parse_bioc_xml(b"<collection><source/><date>2022-01-01</date><key/></collection>").unwrap();
        assert!(c.documents.is_empty());
        let bytes = serialize_bioc_xml(&c).unwrap();
        assert_eq!(parse_bioc_xml(&bytes).unwrap(), c);
    }

    #[test]
    fn malformed_xml_reports_position() {
        let err = parse_bioc_xml(b"<collection>\n  <document>\n</collection>").unwrap_err();
        match err {
            Error::Xml { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_numeric_offset_is_schema_error() {
        let xml = "<collection><date>2022-01-01</date><document><id>d</id>\
                   <passage><offset>x1</offset><text/></passage></document></collection>";
        assert!(matches!(parse_bioc_xml(xml.as_bytes()), Err(Error::Schema { .. })));
        let xml = "<collection><date>2022-01-01</date><document><id>d</id>\
                   <passage><offset>0</offset><text>ab</text><annotation id=\"a\">\
                   <location offset=\"a\" length=\"1\"/><text>a</text></annotation>\
                   </passage></document></collection>";
        assert!(matches!(parse_bioc_xml(xml.as_bytes()), Err(Error::Schema { .. })));
    }

    #[test]
    fn unknown_element_rejected() {
        let xml = "<collection><date>2022-01-01</date><bogus/></collection>";
        assert!(matches!(parse_bioc_xml(xml.as_bytes()), Err(Error::Schema { .. })));
    }

    #[test]
    fn pattern_infon_escapes_gt() {
        let mut c = BiocCollection::new("s", "2022-01-14");
        let mut d = BiocDocument::from_text("d", "x");
        d.infons.insert("negbio_pattern_str", "{}=f >{} {lemma:/no/}=k0");
        c.documents.push(d);
        let out = String::from_utf8(serialize_bioc_xml(&c).unwrap()).unwrap();
        assert!(out.contains(r#"<infon key="negbio_pattern_str">{}=f &gt;{} {lemma:/no/}=k0</infon>"#));
        assert_eq!(parse_bioc_xml(out.as_bytes()).unwrap(), c);
    }

    #[test]
    fn text_whitespace_survives() {
        let mut c = BiocCollection::new("s", "2022-01-14");
        c.documents
            .push(BiocDocument::from_text("d", "  line one\r\n\n\tline \"two\" & <3  "));
        let bytes = serialize_bioc_xml(&c).unwrap();
        assert_eq!(parse_bioc_xml(&bytes).unwrap(), c);
    }
}
