/** Input that parses but violates the schema; maps to exit code 1. */
export class ValidationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ValidationError";
  }
}
