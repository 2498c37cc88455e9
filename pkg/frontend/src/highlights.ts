import type { HighlightSpan } from "./types";

export interface Segment {
  text: string;
  risky: boolean;
}

/**
 * Split text into plain and risky segments using the server's UTF-8 byte
 * offsets verbatim. JS strings are UTF-16, so offsets are translated by
 * walking the code points once.
 */
export function segmentByBytes(text: string, spans: HighlightSpan[]): Segment[] {
  // byteStart[i] = UTF-8 byte offset at which the i-th UTF-16 code unit starts
  const encoder = new TextEncoder();
  const charAtByte = new Map<number, number>();
  let byte = 0;
  let i = 0;
  charAtByte.set(0, 0);
  for (const ch of text) {
    byte += encoder.encode(ch).length;
    i += ch.length; // surrogate pairs occupy two UTF-16 units
    charAtByte.set(byte, i);
  }

  const sorted = [...spans].sort((a, b) => a[0] - b[0]);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of sorted) {
    const charStart = charAtByte.get(start);
    const charEnd = charAtByte.get(end);
    if (charStart === undefined || charEnd === undefined || charStart < cursor) {
      // span does not fall on a code-point boundary or overlaps: skip it
      continue;
    }
    if (charStart > cursor) {
      segments.push({ text: text.slice(cursor, charStart), risky: false });
    }
    segments.push({ text: text.slice(charStart, charEnd), risky: true });
    cursor = charEnd;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), risky: false });
  }
  return segments;
}

export function renderHighlighted(doc: Document, text: string, spans: HighlightSpan[]): DocumentFragment {
  const fragment = doc.createDocumentFragment();
  for (const segment of segmentByBytes(text, spans)) {
    if (segment.risky) {
      const mark = doc.createElement("mark");
      mark.className = "risk";
      mark.textContent = segment.text;
      fragment.appendChild(mark);
    } else {
      fragment.appendChild(doc.createTextNode(segment.text));
    }
  }
  return fragment;
}
