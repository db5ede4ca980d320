//! Built-in rule-based constituency parser.
//!
//! Tags words from a small lexicon plus suffix heuristics, chunks noun,
//! adjective, adverb and prepositional phrases, groups verbs with their
//! auxiliaries and assembles one clause per verb group. The output is a
//! Penn-Treebank style tree for `tree2dep`; it covers the declarative
//! sentence shapes common in radiology reports, not English at large.

use super::ptb::ParseTree;
use crate::ssplit::tokenize_text;

fn lexicon(w: &str) -> Option<&'static str> {
    Some(match w {
        "the" | "a" | "an" | "this" | "these" | "those" | "no" | "any" | "some" | "each" | "every" | "all"
        | "another" | "both" | "either" | "neither" => "DT",
        "it" | "they" | "he" | "she" | "we" | "i" | "you" | "them" => "PRP",
        "its" | "their" | "his" | "her" | "our" => "PRP$",
        "which" | "whom" | "who" => "WDT",
        "may" | "might" | "could" | "can" | "cannot" | "should" | "would" | "will" | "must" | "shall" => "MD",
        "is" | "has" | "does" | "appears" | "seems" | "suggests" | "represents" | "remains" | "shows"
        | "demonstrates" | "measures" | "persists" | "excludes" | "reflects" | "indicates" | "favors" | "lacks" => {
            "VBZ"
        }
        "are" | "am" | "have" | "do" => "VBP",
        "was" | "were" | "had" | "did" => "VBD",
        "be" | "appear" | "seem" | "suggest" | "represent" | "remain" | "show" | "demonstrate" | "exclude" | "rule"
        | "evaluate" | "assess" | "see" | "identify" | "reflect" | "indicate" | "favor" | "lack" | "persist"
        | "measure" | "correlate" | "consider" => "VB",
        "been" | "seen" | "shown" | "given" | "done" | "taken" => "VBN",
        "being" => "VBG",
        "of" | "in" | "on" | "at" | "with" | "without" | "for" | "from" | "by" | "within" | "into" | "under"
        | "over" | "about" | "than" | "as" | "since" | "after" | "before" | "along" | "through" | "throughout"
        | "near" | "beneath" | "below" | "above" | "versus" | "vs" | "per" | "via" | "despite" | "except" | "upon"
        | "between" | "across" | "behind" | "because" | "if" | "whether" | "although" | "while" | "like" | "around"
        | "beyond" | "adjacent" => "IN",
        "to" => "TO",
        "and" | "or" | "but" | "nor" | "plus" => "CC",
        "not" | "n't" | "never" | "also" | "again" | "now" | "still" | "otherwise" | "only" | "however" | "further"
        | "longer" | "very" | "more" | "less" | "most" | "well" | "please" | "rather" | "here" | "there" | "yet"
        | "already" | "too" => "RB",
        "out" | "up" | "down" => "RP",
        "possible" | "probable" | "questionable" | "likely" | "unlikely" | "new" | "small" | "large" | "mild"
        | "moderate" | "severe" | "minimal" | "trace" | "stable" | "unchanged" | "normal" | "clear" | "free"
        | "negative" | "positive" | "absent" | "present" | "suspicious" | "concerning" | "consistent"
        | "compatible" | "evident" | "apparent" | "suggestive" | "equivocal" | "tortuous" | "diffuse" | "focal"
        | "patchy" | "bilateral" | "left" | "right" | "prior" | "previous" | "low" | "high" | "acute" | "chronic"
        | "significant" | "definite" | "obvious" | "worrisome" | "residual" | "persistent" | "prominent"
        | "visible" | "subtle" | "other" | "same" | "tiny" | "trivial" | "extensive" | "gone" | "due" | "worse"
        | "better" | "smaller" | "larger" | "upper" | "lower" | "mid" | "basilar" | "underlying" | "overlying"
        | "apical" | "appreciable" => "JJ",
        "interval" | "hospital" | "signal" | "removal" | "evidence" | "process" | "air" | "size" | "silhouette"
        | "chest" | "heart" | "lung" | "lungs" | "focus" | "thorax" | "emphysema" | "edema" | "status"
        | "atelectasis" | "pneumothorax" | "pneumonia" | "pneumonitis" => "NN",
        _ => return None,
    })
}

fn punct_tag(w: &str) -> Option<&'static str> {
    Some(match w {
        "." | "!" | "?" => ".",
        "," => ",",
        ":" | ";" | "-" | "--" | "/" => ":",
        "(" => "-LRB-",
        ")" => "-RRB-",
        "[" => "-LSB-",
        "]" => "-RSB-",
        "{" => "-LCB-",
        "}" => "-RCB-",
        "\"" | "\u{201C}" | "\u{201D}" => "``",
        _ => return None,
    })
}

const BE: &[&str] = &["is", "are", "was", "were", "be", "been", "being", "am"];
const HAVE: &[&str] = &["has", "have", "had", "having"];

fn is_noun(tag: &str) -> bool {
    matches!(tag, "NN" | "NNS" | "NNP" | "NNPS")
}

fn is_verb(tag: &str) -> bool {
    tag.starts_with("VB")
}

fn is_adj(tag: &str) -> bool {
    matches!(tag, "JJ" | "JJR" | "JJS")
}

fn suffix_tag(w: &str) -> &'static str {
    const ADJ_SUFFIXES: &[&str] = &[
        "ous", "al", "ic", "ive", "able", "ible", "ary", "ful", "less", "ular", "oid", "ent", "ant",
    ];
    if w.ends_with("ly") && w.len() > 3 {
        "RB"
    } else if w.ends_with("ing") && w.len() > 4 {
        "VBG"
    } else if w.ends_with("ed") && w.len() > 3 {
        "VBN"
    } else if ADJ_SUFFIXES.iter().any(|s| w.ends_with(s) && w.len() > s.len() + 2) {
        "JJ"
    } else if w.ends_with('s') && !["ss", "us", "is", "ys", "xs"].iter().any(|s| w.ends_with(s)) && w.len() > 3 {
        "NNS"
    } else {
        "NN"
    }
}

/// Part-of-speech tags for a token sequence.
pub fn tag_words(words: &[&str]) -> Vec<String> {
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let mut tags: Vec<&'static str> = Vec::with_capacity(words.len());
    for (i, w) in lower.iter().enumerate() {
        let next = lower.get(i + 1).map(String::as_str);
        let prev_tag = i.checked_sub(1).map(|j| tags[j]);
        let prev = i.checked_sub(1).map(|j| lower[j].as_str());
        let tag = if let Some(t) = punct_tag(w) {
            t
        } else if w.starts_with(|c: char| c.is_ascii_digit()) {
            "CD"
        } else if w == "there" && next.is_some_and(|n| BE.contains(&n) || HAVE.contains(&n) || n == "may") {
            "EX"
        } else if w == "no" && next == Some("longer") {
            "RB"
        } else if w == "that" {
            if prev_tag.is_some_and(is_noun) {
                "WDT"
            } else if next.is_some_and(|n| lexicon(n).is_some_and(is_verb) || lexicon(n) == Some("MD")) {
                "DT"
            } else {
                "IN"
            }
        } else if let Some(t) = lexicon(w) {
            t
        } else {
            match suffix_tag(w) {
                "VBN" => {
                    let after_aux = prev.is_some_and(|p| BE.contains(&p) || HAVE.contains(&p))
                        || (prev_tag == Some("RB")
                            && i >= 2
                            && (BE.contains(&lower[i - 2].as_str()) || HAVE.contains(&lower[i - 2].as_str())));
                    let clause_final = next.is_none_or(|n| {
                        punct_tag(n).is_some() || matches!(lexicon(n), Some("IN" | "TO" | "RB" | "CC"))
                    });
                    if after_aux {
                        "VBN"
                    } else if prev_tag.is_some_and(|t| is_noun(t) || t == "PRP") && clause_final {
                        "VBD"
                    } else {
                        "JJ"
                    }
                }
                "VBG" => {
                    if next.is_some_and(|n| matches!(lexicon(n).unwrap_or_else(|| suffix_tag(n)), "NN" | "NNS" | "JJ"))
                        && !prev.is_some_and(|p| BE.contains(&p))
                    {
                        "JJ"
                    } else {
                        "VBG"
                    }
                }
                t => t,
            }
        };
        // A base-form verb right after a noun or pronoun subject is finite.
        let tag = if tag == "VB" && prev_tag.is_some_and(|t| is_noun(t) || t == "PRP") {
            if lower[i].ends_with('s') {
                "VBZ"
            } else {
                "VBP"
            }
        } else if tag == "VB" && w == "rule" && next != Some("out") {
            "NN"
        } else {
            tag
        };
        tags.push(tag);
    }
    tags.into_iter().map(str::to_string).collect()
}

#[derive(Debug, Clone)]
enum Item {
    /// A finished phrase (NP, ADJP, ADVP, PP) or a bare preterminal.
    Tree(ParseTree),
    /// Auxiliaries, adverbs and verbs of one verb group, as preterminals.
    Verbs(Vec<ParseTree>),
}

impl Item {
    fn label(&self) -> &str {
        match self {
            Item::Tree(t) => t.label(),
            Item::Verbs(_) => "VG",
        }
    }

    fn tree(self) -> ParseTree {
        match self {
            Item::Tree(t) => t,
            Item::Verbs(v) => ParseTree::node("VP", v),
        }
    }
}

/// Brackets inside leaves would break the bracketed notation.
fn escape(word: &str) -> &str {
    match word {
        "(" => "-LRB-",
        ")" => "-RRB-",
        "[" => "-LSB-",
        "]" => "-RSB-",
        "{" => "-LCB-",
        "}" => "-RCB-",
        w => w,
    }
}

fn pre(tag: &str, word: &str) -> ParseTree {
    ParseTree::pre(tag, escape(word))
}

fn is_np_word(tag: &str) -> bool {
    is_noun(tag) || tag == "CD"
}

/// Group tagged words into base chunks.
fn chunk(words: &[&str], tags: &[String]) -> Vec<Item> {
    let n = words.len();
    let mut items = Vec::new();
    let mut i = 0;
    while i < n {
        let t = tags[i].as_str();
        // noun phrase: determiners, modifiers, nominal head
        if matches!(t, "DT" | "PRP$") || is_adj(t) || is_np_word(t) || (t == "RB" && i + 1 < n && is_adj(&tags[i + 1]))
        {
            let mut j = i;
            while j < n && matches!(tags[j].as_str(), "DT" | "PRP$") {
                j += 1;
            }
            let mut last_noun = None;
            let mut k = j;
            while k < n {
                let tk = tags[k].as_str();
                let ok = is_adj(tk) || is_np_word(tk) || (tk == "RB" && k + 1 < n && is_adj(&tags[k + 1]));
                if !ok {
                    break;
                }
                if is_np_word(tk) {
                    last_noun = Some(k);
                }
                k += 1;
            }
            match last_noun {
                Some(end) => {
                    let kids = (i..=end).map(|x| pre(&tags[x], words[x])).collect();
                    items.push(Item::Tree(ParseTree::node("NP", kids)));
                    i = end + 1;
                }
                None if k > j => {
                    // adjectives without a noun; leading determiners stand alone
                    for x in i..j {
                        items.push(Item::Tree(ParseTree::node("NP", vec![pre(&tags[x], words[x])])));
                    }
                    let kids = (j..k).map(|x| pre(&tags[x], words[x])).collect();
                    items.push(Item::Tree(ParseTree::node("ADJP", kids)));
                    i = k;
                }
                None if j == i => {
                    items.push(Item::Tree(pre(t, words[i])));
                    i += 1;
                }
                None => {
                    let kids = (i..j).map(|x| pre(&tags[x], words[x])).collect();
                    items.push(Item::Tree(ParseTree::node("NP", kids)));
                    i = j;
                }
            }
            continue;
        }
        if matches!(t, "PRP" | "EX") {
            items.push(Item::Tree(ParseTree::node("NP", vec![pre(t, words[i])])));
            i += 1;
            continue;
        }
        // verb group: auxiliaries and adverbs up to the last verb
        if t == "MD" || is_verb(t) || (t == "TO" && i + 1 < n && tags[i + 1] == "VB") {
            let mut k = i;
            let mut last_verb = i;
            while k < n {
                let tk = tags[k].as_str();
                if tk == "MD" || is_verb(tk) || tk == "TO" {
                    if tk == "TO" && !(k + 1 < n && tags[k + 1] == "VB") {
                        break;
                    }
                    last_verb = k;
                } else if tk != "RB" {
                    break;
                }
                k += 1;
            }
            let kids = (i..=last_verb).map(|x| pre(&tags[x], words[x])).collect();
            items.push(Item::Verbs(kids));
            i = last_verb + 1;
            continue;
        }
        if t == "RB" {
            let mut k = i;
            while k < n && tags[k] == "RB" {
                k += 1;
            }
            let kids = (i..k).map(|x| pre(&tags[x], words[x])).collect();
            items.push(Item::Tree(ParseTree::node("ADVP", kids)));
            i = k;
            continue;
        }
        items.push(Item::Tree(pre(t, words[i])));
        i += 1;
    }
    items
}

fn is_coordinable(label: &str) -> bool {
    matches!(label, "NP" | "ADJP")
}

/// `X (, X)* (,)? CC X` over noun or adjective phrases.
fn coordinate(items: Vec<Item>) -> Vec<Item> {
    let mut items = items;
    let mut j = 0;
    while j < items.len() {
        let is_cc = items[j].label() == "CC";
        if !(is_cc && j > 0 && j + 1 < items.len()) {
            j += 1;
            continue;
        }
        let cat = items[j + 1].label().to_string();
        let mut k = j - 1;
        if items[k].label() == "," && k > 0 {
            k -= 1;
        }
        if !is_coordinable(&cat) || items[k].label() != cat {
            j += 1;
            continue;
        }
        let mut start = k;
        while start >= 2 && items[start - 1].label() == "," && items[start - 2].label() == cat {
            start -= 2;
        }
        let members: Vec<ParseTree> = items.drain(start..=j + 1).map(Item::tree).collect();
        items.insert(start, Item::Tree(ParseTree::node(cat, members)));
        j = start + 1;
    }
    items
}

/// Build prepositional phrases and attach them to the preceding noun or
/// adjective phrase, right to left so that chains nest.
fn attach_pps(mut items: Vec<Item>) -> Vec<Item> {
    let mut i = items.len();
    while i > 0 {
        i -= 1;
        let label = items[i].label().to_string();
        let next_np = items.get(i + 1).is_some_and(|x| x.label() == "NP");
        if matches!(label.as_str(), "IN" | "TO") && next_np {
            let np = items.remove(i + 1);
            let prep = items.remove(i);
            let mut kids = vec![prep.tree(), np.tree()];
            // "rather than X"
            if i > 0 && items[i - 1].label() == "ADVP" && items[i - 1].tree_words() == ["rather"] {
                let adv = items.remove(i - 1);
                kids.insert(0, adv.tree());
                i -= 1;
            }
            items.insert(i, Item::Tree(ParseTree::node("PP", kids)));
            // fall through to attach this PP to its left neighbour
        }
        if items[i].label() == "PP" && i > 0 && matches!(items[i - 1].label(), "NP" | "ADJP") {
            let pp = items.remove(i);
            let host = items.remove(i - 1);
            let host_label = host.label().to_string();
            let host_tree = host.tree();
            let merged = if host_label == "ADJP" {
                let mut kids = host_tree.children().to_vec();
                kids.push(pp.tree());
                ParseTree::node("ADJP", kids)
            } else {
                ParseTree::node("NP", vec![host_tree, pp.tree()])
            };
            items.insert(i - 1, Item::Tree(merged));
        }
    }
    items
}

impl Item {
    fn tree_words(&self) -> Vec<String> {
        match self {
            Item::Tree(t) => t.leaves().iter().map(|w| w.to_lowercase()).collect(),
            Item::Verbs(v) => v.iter().flat_map(|t| t.leaves()).map(|w| w.to_lowercase()).collect(),
        }
    }
}

/// Nest a verb group: each verb or modal opens a VP containing the rest;
/// adverbs stay with the verb before them.
fn verb_phrase(verbs: Vec<ParseTree>, complement: Vec<ParseTree>) -> ParseTree {
    let mut groups: Vec<Vec<ParseTree>> = Vec::new();
    for v in verbs {
        let is_adv = v.label() == "RB";
        match groups.last_mut() {
            Some(g) if is_adv => g.push(v),
            _ if is_adv => groups.push(vec![v]),
            _ => groups.push(vec![v]),
        }
    }
    let mut inner: Option<ParseTree> = None;
    let mut complement = Some(complement);
    for mut g in groups.into_iter().rev() {
        match inner.take() {
            Some(vp) => g.push(vp),
            None => g.extend(complement.take().unwrap_or_default()),
        }
        inner = Some(ParseTree::node("VP", g));
    }
    inner.unwrap_or_else(|| ParseTree::node("VP", vec![]))
}

fn is_final_punct(item: &Item) -> bool {
    item.label() == "."
}

/// Children of a clause built from `items`.
fn clause(mut items: Vec<Item>) -> (String, Vec<ParseTree>) {
    let Some(v) = items.iter().position(|x| matches!(x, Item::Verbs(_))) else {
        return ("FRAG".into(), items.into_iter().map(Item::tree).collect());
    };
    let trailing = if items.last().is_some_and(is_final_punct) {
        items.pop()
    } else {
        None
    };
    let mut post: Vec<Item> = items.split_off(v + 1);
    let Some(Item::Verbs(verbs)) = items.pop() else {
        unreachable!()
    };
    let pre = items;

    let mut complement: Vec<ParseTree> = Vec::new();
    if let Some(w) = post.iter().position(|x| matches!(x, Item::Verbs(_))) {
        let mut start = w;
        if start > 0 && post[start - 1].label() == "NP" {
            start -= 1;
        }
        let intro = start > 0 && matches!(post[start - 1].label(), "WDT" | "IN");
        if intro {
            start -= 1;
        }
        let mut embedded = post.split_off(start);
        let sbar_head = if intro { Some(embedded.remove(0).tree()) } else { None };
        let (label, kids) = clause(embedded);
        let s = ParseTree::node(if label == "FRAG" { "S".to_string() } else { label }, kids);
        complement.extend(post.into_iter().map(Item::tree));
        match sbar_head {
            Some(h) => complement.push(ParseTree::node("SBAR", vec![h, s])),
            None => complement.push(s),
        }
    } else {
        complement.extend(post.into_iter().map(Item::tree));
    }
    let mut kids: Vec<ParseTree> = pre.into_iter().map(Item::tree).collect();
    kids.push(verb_phrase(verbs, complement));
    if let Some(p) = trailing {
        kids.push(p.tree());
    }
    ("S".into(), kids)
}

/// Parse a tokenized sentence.
pub fn parse_words(words: &[&str]) -> ParseTree {
    if words.is_empty() {
        return ParseTree::node("S1", vec![]);
    }
    let tags = tag_words(words);
    let items = attach_pps(coordinate(chunk(words, &tags)));
    let (label, kids) = clause(items);
    ParseTree::node("S1", vec![ParseTree::node(label, kids)])
}

/// Tokenize and parse sentence text.
pub fn parse_text(text: &str) -> ParseTree {
    let tokens = tokenize_text(text, 0);
    let words: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
    parse_words(&words)
}
