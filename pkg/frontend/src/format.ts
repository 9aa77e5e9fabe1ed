/** Display helpers: currency to the cent, rates as percent. */

export function formatCents(value: number): string {
  return value.toLocaleString("en-US", {
    minimumFractionDigits: 2,
    maximumFractionDigits: 2,
  });
}

export function formatRate(value: number): string {
  return `${(value * 100).toFixed(2)}%`;
}

export function formatPeriods(value: number): string {
  return value.toFixed(1);
}

/** Cent-level equality (used to assert the inheritance binding). */
export function sameToTheCent(a: number, b: number): boolean {
  return Math.round(a * 100) === Math.round(b * 100);
}
