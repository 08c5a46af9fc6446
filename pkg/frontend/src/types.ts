/** Shared types mirroring the JSON shapes served by the workbench API. */

export interface ReviewItem {
  doc_id: string;
  text: string;
  /** External aliases only; the server never ships internal class names. */
  candidates: [string, string];
  /** Prompt iteration the document was classified under, when known. */
  iteration?: number;
  /** Raw model response; hidden by default behind a toggle. */
  raw_response?: string;
}

export interface PreferenceRecord {
  doc_id: string;
  y_w: string;
  y_l: string;
  reviewer: string;
  round?: number;
}

export interface AlignmentMatrix {
  rows: string[];
  cols: string[];
  counts: number[][];
}

export interface ClassDiagnostic {
  class_name: string;
  verdict: "validated" | "overlapping" | "vague" | "failed";
  purity?: number;
  share?: number;
}

export interface DriftReport {
  verdict: string;
  chi2?: { statistic: number; p_value: number; significant: boolean };
  alerts?: unknown[];
}
