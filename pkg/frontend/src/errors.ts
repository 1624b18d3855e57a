export class MissingColumn extends Error {
  constructor(column: string, available: string[]) {
    super(`column "${column}" not in CSV header (${available.join(", ")})`);
    this.name = "MissingColumn";
  }
}

export class TooFewPoints extends Error {
  constructor(group: string, n: number) {
    super(`group "${group}" has ${n} points; a fit needs at least 3`);
    this.name = "TooFewPoints";
  }
}
