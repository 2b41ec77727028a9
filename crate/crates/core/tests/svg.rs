use barypoly::cli::{derivative_figures, figure_document};
use barypoly::io::config::regular_polygon;
use barypoly::io::{dual_svg, SvgStyle};
use barypoly::{dual_trace, ParamVector, PointFamily};

fn square() -> PointFamily {
    PointFamily::from_rows(&regular_polygon(4, 1.0)).unwrap()
}

fn parse(doc: &str) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(doc).expect("well-formed XML")
}

#[test]
fn iterate_figure_structure() {
    let t = ParamVector::new(vec![0.2, 0.3, 0.4, 0.5]).unwrap();
    let doc = figure_document(&square(), &t, 8, "a & b".into()).unwrap();
    let xml = parse(&doc);
    let root = xml.root_element();
    assert!(root.has_tag_name(("http://www.w3.org/2000/svg", "svg")));
    assert_eq!(root.attribute("width"), Some("600"));
    let polys: Vec<_> = root.children().filter(|n| n.has_tag_name("polygon")).collect();
    assert_eq!(polys.len(), 9);
    for (i, p) in polys.iter().enumerate() {
        assert_eq!(p.attribute("data-iterate"), Some(i.to_string().as_str()));
        let pts = p.attribute("points").unwrap();
        assert_eq!(pts.split(' ').count(), 4);
        for pair in pts.split(' ') {
            for c in pair.split(',') {
                let v: f64 = c.parse().unwrap();
                assert!((0.0..=600.0).contains(&v));
            }
        }
    }
    assert_eq!(root.children().filter(|n| n.attribute("class") == Some("limit")).count(), 1);
    let title = root.children().find(|n| n.has_tag_name("title")).unwrap();
    assert_eq!(title.text(), Some("a & b"));
}

#[test]
fn derivative_sequence_has_six_documents() {
    let t = ParamVector::regular(4, 0.2).unwrap();
    let docs = derivative_figures(&square(), &t, 20, 5).unwrap();
    assert_eq!(docs.len(), 6);
    for doc in &docs {
        parse(doc);
    }
    // Order 1 uses t' = 0.8^3.
    assert!(docs[1].contains("t = 0.512"));
}

#[test]
fn dual_figure_marks_centroid() {
    let t = ParamVector::new(vec![0.2, 0.3, 0.4]).unwrap();
    let tri = PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let trace = dual_trace(&tri, &t, 40).unwrap();
    let doc = dual_svg(&tri, &trace, &SvgStyle::default()).unwrap();
    let xml = parse(&doc);
    let dots = xml.descendants().filter(|n| n.attribute("class") == Some("dual")).count();
    assert_eq!(dots, trace.len());
    assert_eq!(xml.descendants().filter(|n| n.attribute("class") == Some("centroid")).count(), 1);
}
