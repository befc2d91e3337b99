/** Display formatting for values taken verbatim from service responses. */

/** Compact decimal with up to three places: 4.5 -> "4.5", 11/3 -> "3.667". */
export function formatScore(score: number): string {
  const rounded = Math.round(score * 1000) / 1000;
  return String(rounded);
}

export function formatNpmi(value: number): string {
  return value.toFixed(3);
}

/** "explains m of L edges" summary for one relationship breakdown row. */
export function formatFraction(explained: number, length: number): string {
  if (length === 0) {
    return "unreachable";
  }
  return `${explained}/${length}`;
}
